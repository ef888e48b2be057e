import { existsSync, mkdirSync, writeFileSync } from "node:fs";
import { join } from "node:path";

import {
    Family, FAMILIES, csvName,
    readLocalBenefit, readStrategies, readWelfare,
} from "./schema.js";
import {
    Figure, localBenefitFigure, strategiesFigure, welfareEfficiencyFigure,
} from "./figures.js";

const BUILDERS: Record<Family, (file: string) => Figure> = {
    welfare_efficiency: (f) => welfareEfficiencyFigure(readWelfare(f)),
    local_benefit: (f) => localBenefitFigure(readLocalBenefit(f)),
    strategies: (f) => strategiesFigure(readStrategies(f)),
};

// Reads the sweep plot CSVs from reportDir and writes one SVG per figure
// family into outDir. Families whose CSV is absent are skipped with a
// warning; a present but malformed CSV is an error. Returns the written
// file paths.
export function renderFigures(reportDir: string, outDir: string): string[] {
    const written: string[] = [];
    for (const family of FAMILIES) {
        const csv = join(reportDir, csvName(family));
        if (!existsSync(csv)) {
            console.warn(`skipping ${family}: ${csv} not found`);
            continue;
        }
        const figure = BUILDERS[family](csv);
        mkdirSync(outDir, { recursive: true });
        const out = join(outDir, `fig_${figure.name}.svg`);
        writeFileSync(out, figure.svg);
        written.push(out);
    }
    return written;
}
