export { renderFigures } from "./render.js";
export {
    localBenefitFigure, strategiesFigure, welfareEfficiencyFigure,
} from "./figures.js";
export {
    FAMILIES, SchemaError, csvName,
    readLocalBenefit, readStrategies, readWelfare,
} from "./schema.js";
export { parseMeta } from "./svg.js";
