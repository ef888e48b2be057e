import {
    LocalBenefitRow, StrategyRow, WelfareRow,
} from "./schema.js";
import {
    Canvas, FigureMeta, SeriesMeta, color, extent, fmt, scale,
} from "./svg.js";

export interface Figure {
    name: string;
    svg: string;
}

interface Panel {
    x0: number;
    y0: number;
    x1: number;
    y1: number;
}

function axes(c: Canvas, p: Panel, title: string) {
    c.line(p.x0, p.y1, p.x1, p.y1, "#000000");
    c.line(p.x0, p.y0, p.x0, p.y1, "#000000");
    c.text((p.x0 + p.x1) / 2, p.y0 - 8, title, { anchor: "middle", size: 13 });
}

function yTicks(c: Canvas, p: Panel, dom: [number, number]) {
    const sy = scale(dom, [p.y1, p.y0]);
    for (const t of [dom[0], (dom[0] + dom[1]) / 2, dom[1]]) {
        const y = sy(t);
        c.line(p.x0 - 3, y, p.x0, y, "#000000");
        c.text(p.x0 - 6, y + 4, fmt(t), { anchor: "end" });
    }
}

function uniq<T>(values: T[]): T[] {
    return [...new Set(values)];
}

function cellLabel(budget: number, alpha: number): string {
    return `B0=${fmt(budget)} a=${fmt(alpha)}`;
}

// One curve per alpha value in both panels: welfare improvement over the
// local-design baseline, and benefit gained per subsidy euro. Cells that
// paid no subsidy have no efficiency ratio and are omitted from the
// right panel rather than plotted as zero.
export function welfareEfficiencyFigure(rows: WelfareRow[]): Figure {
    const c = new Canvas(880, 380);
    const alphas = uniq(rows.map((row) => row.alpha)).sort((a, b) => a - b);
    const budgets = uniq(rows.map((row) => row.central_budget)).sort((a, b) => a - b);
    const xDom = extent(budgets);
    const left: Panel = { x0: 70, y0: 40, x1: 400, y1: 320 };
    const right: Panel = { x0: 520, y0: 40, x1: 850, y1: 320 };
    axes(c, left, "Welfare improvement vs central budget");
    axes(c, right, "Subsidy efficiency vs central budget");

    const impDom = extent(rows.map((row) => row.ssw_improvement_pct));
    const effValues = rows
        .map((row) => row.subsidy_efficiency)
        .filter((v): v is number => v !== "no-subsidy");
    const effDom = extent(effValues.length > 0 ? effValues : [0, 1]);
    yTicks(c, left, impDom);
    yTicks(c, right, effDom);
    for (const p of [left, right]) {
        const sx = scale(xDom, [p.x0, p.x1]);
        for (const b of budgets) {
            c.line(sx(b), p.y1, sx(b), p.y1 + 3, "#000000");
            c.text(sx(b), p.y1 + 15, fmt(b), { anchor: "middle" });
        }
    }
    c.text((left.x0 + left.x1) / 2, 345, "central budget (EUR)", { anchor: "middle" });
    c.text((right.x0 + right.x1) / 2, 345, "central budget (EUR)", { anchor: "middle" });
    c.text(20, 180, "SSW improvement (%)", { rotate: -90 });
    c.text(470, 180, "benefit / subsidy", { rotate: -90 });

    const series: SeriesMeta[] = [];
    alphas.forEach((alpha, i) => {
        const mine = rows
            .filter((row) => row.alpha === alpha)
            .sort((a, b) => a.central_budget - b.central_budget);
        const sxL = scale(xDom, [left.x0, left.x1]);
        const syL = scale(impDom, [left.y1, left.y0]);
        const imp: [number, number][] = mine.map(
            (row) => [sxL(row.central_budget), syL(row.ssw_improvement_pct)],
        );
        c.polyline(imp, color(i));
        imp.forEach(([x, y]) => c.circle(x, y, color(i)));

        const sxR = scale(xDom, [right.x0, right.x1]);
        const syR = scale(effDom, [right.y1, right.y0]);
        const eff: [number, number][] = mine
            .filter((row) => row.subsidy_efficiency !== "no-subsidy")
            .map((row) => [
                sxR(row.central_budget), syR(row.subsidy_efficiency as number),
            ]);
        if (eff.length > 0) {
            c.polyline(eff, color(i));
            eff.forEach(([x, y]) => c.circle(x, y, color(i)));
        }
        series.push({ label: `alpha=${fmt(alpha)}`, points: mine.length });
    });
    c.legend(right.x1 - 80, 60, series.map((s) => s.label));
    const meta: FigureMeta = { figure: "welfare_efficiency", series };
    return { name: "welfare_efficiency", svg: c.render(meta) };
}

interface BarGroup {
    label: string;
    bars: { label: string; value: number }[];
}

function groupedBars(
    figure: string, title: string, yLabel: string, groups: BarGroup[],
): Figure {
    const c = new Canvas(880, 380);
    const p: Panel = { x0: 80, y0: 40, x1: 700, y1: 320 };
    axes(c, p, title);
    const values = groups.flatMap((g) => g.bars.map((b) => b.value));
    const dom = extent([0, ...values]);
    const sy = scale(dom, [p.y1, p.y0]);
    yTicks(c, p, dom);
    c.text(20, 180, yLabel, { rotate: -90 });

    const groupWidth = (p.x1 - p.x0) / Math.max(groups.length, 1);
    const barLabels = uniq(groups.flatMap((g) => g.bars.map((b) => b.label)));
    groups.forEach((g, gi) => {
        const gx = p.x0 + gi * groupWidth;
        const barWidth = (groupWidth * 0.8) / Math.max(g.bars.length, 1);
        g.bars.forEach((b, bi) => {
            const x = gx + groupWidth * 0.1 + bi * barWidth;
            const y0 = sy(0);
            const y = sy(b.value);
            c.rect(x, Math.min(y, y0), barWidth * 0.9, Math.abs(y - y0),
                color(barLabels.indexOf(b.label)));
        });
        c.text(gx + groupWidth / 2, p.y1 + 15, g.label, { anchor: "middle" });
    });
    c.line(p.x0, sy(0), p.x1, sy(0), "#888888");
    c.legend(p.x1 + 10, 60, barLabels);

    const series = groups.map((g) => ({ label: g.label, points: g.bars.length }));
    const meta: FigureMeta = { figure, series };
    return { name: figure, svg: c.render(meta) };
}

// One bar group per region; each bar is the local-benefit gain of the
// joint mechanism over the local-design baseline for one sweep cell.
export function localBenefitFigure(rows: LocalBenefitRow[]): Figure {
    const regions = uniq(rows.map((row) => row.region));
    const groups = regions.map((region) => ({
        label: region,
        bars: rows
            .filter((row) => row.region === region)
            .map((row) => ({
                label: cellLabel(row.central_budget, row.alpha),
                value: row.lb_ivcg - row.lb_ld,
            })),
    }));
    return groupedBars(
        "local_benefit",
        "Local benefit gain over local design, by region",
        "benefit gain (EUR/yr)",
        groups,
    );
}

// One bar group per reporting strategy; each bar is the system welfare
// reached in one sweep cell.
export function strategiesFigure(rows: StrategyRow[]): Figure {
    const strategies = uniq(rows.map((row) => row.strategy));
    const groups = strategies.map((strategy) => ({
        label: strategy,
        bars: rows
            .filter((row) => row.strategy === strategy)
            .map((row) => ({
                label: cellLabel(row.central_budget, row.alpha),
                value: row.ssw,
            })),
    }));
    return groupedBars(
        "strategies",
        "System welfare by reporting strategy",
        "SSW (EUR/yr)",
        groups,
    );
}
