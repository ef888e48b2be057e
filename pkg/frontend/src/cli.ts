import { renderFigures } from "./render.js";

const [reportDir, outDir] = process.argv.slice(2);
if (!reportDir || !outDir) {
    console.error("usage: node dist/cli.js <report-dir> <out-dir>");
    process.exit(2);
}
const written = renderFigures(reportDir, outDir);
for (const f of written) console.log(f);
if (written.length === 0) {
    console.error("no figures rendered");
    process.exit(1);
}
