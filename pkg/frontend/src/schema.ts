import { readFileSync } from "node:fs";
import Papa from "papaparse";

export class SchemaError extends Error {}

export interface WelfareRow {
    central_budget: number;
    alpha: number;
    ssw_improvement_pct: number;
    // "no-subsidy" marks cells where no subsidy was paid; such points are
    // skipped in the efficiency panel, never drawn as zero
    subsidy_efficiency: number | "no-subsidy";
}

export interface LocalBenefitRow {
    central_budget: number;
    alpha: number;
    region: string;
    lb_ivcg: number;
    lb_ld: number;
}

export interface StrategyRow {
    strategy: string;
    alpha: number;
    central_budget: number;
    ssw: number;
}

const COLUMNS = {
    welfare_efficiency: [
        "central_budget", "alpha", "ssw_improvement_pct", "subsidy_efficiency",
    ],
    local_benefit: ["central_budget", "alpha", "region", "lb_ivcg", "lb_ld"],
    strategies: ["strategy", "alpha", "central_budget", "ssw"],
} as const;

export type Family = keyof typeof COLUMNS;

export const FAMILIES: readonly Family[] = [
    "welfare_efficiency", "local_benefit", "strategies",
];

export function csvName(family: Family): string {
    return `plot_${family}.csv`;
}

function parseRows(file: string, family: Family): Record<string, string>[] {
    const text = readFileSync(file, "utf-8");
    const parsed = Papa.parse<Record<string, string>>(text.trim(), {
        header: true,
        skipEmptyLines: true,
    });
    if (parsed.errors.length > 0) {
        const e = parsed.errors[0];
        throw new SchemaError(`${file}: row ${e.row}: ${e.message}`);
    }
    const fields = parsed.meta.fields ?? [];
    for (const col of COLUMNS[family]) {
        if (!fields.includes(col)) {
            throw new SchemaError(`${file}: missing column "${col}"`);
        }
    }
    return parsed.data;
}

function num(row: Record<string, string>, col: string, file: string): number {
    const v = Number(row[col]);
    if (!Number.isFinite(v)) {
        throw new SchemaError(`${file}: column "${col}": not a number: ${row[col]}`);
    }
    return v;
}

export function readWelfare(file: string): WelfareRow[] {
    return parseRows(file, "welfare_efficiency").map((r) => ({
        central_budget: num(r, "central_budget", file),
        alpha: num(r, "alpha", file),
        ssw_improvement_pct: num(r, "ssw_improvement_pct", file),
        subsidy_efficiency:
            r.subsidy_efficiency === "no-subsidy"
                ? "no-subsidy"
                : num(r, "subsidy_efficiency", file),
    }));
}

export function readLocalBenefit(file: string): LocalBenefitRow[] {
    return parseRows(file, "local_benefit").map((r) => ({
        central_budget: num(r, "central_budget", file),
        alpha: num(r, "alpha", file),
        region: r.region,
        lb_ivcg: num(r, "lb_ivcg", file),
        lb_ld: num(r, "lb_ld", file),
    }));
}

export function readStrategies(file: string): StrategyRow[] {
    return parseRows(file, "strategies").map((r) => ({
        strategy: r.strategy,
        alpha: num(r, "alpha", file),
        central_budget: num(r, "central_budget", file),
        ssw: num(r, "ssw", file),
    }));
}
