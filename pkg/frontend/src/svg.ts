// Minimal deterministic SVG assembly: fixed canvas, fixed palette, no
// randomness, so identical inputs yield byte-identical files.

export interface SeriesMeta {
    label: string;
    points: number;
}

export interface FigureMeta {
    figure: string;
    series: SeriesMeta[];
}

export const PALETTE = [
    "#1b6ca8", "#d1495b", "#2e933c", "#8c5383", "#e0a458", "#465362",
];

export function color(i: number): string {
    return PALETTE[i % PALETTE.length];
}

export function scale(
    domain: [number, number], range: [number, number],
): (v: number) => number {
    const span = domain[1] - domain[0];
    return (v) => {
        const t = span === 0 ? 0.5 : (v - domain[0]) / span;
        return range[0] + t * (range[1] - range[0]);
    };
}

export function extent(values: number[]): [number, number] {
    let lo = Math.min(...values);
    let hi = Math.max(...values);
    if (lo === hi) {
        lo -= 1;
        hi += 1;
    }
    return [lo, hi];
}

export function fmt(v: number): string {
    const a = Math.abs(v);
    if (a >= 1e9) return `${trim(v / 1e9)}G`;
    if (a >= 1e6) return `${trim(v / 1e6)}M`;
    if (a >= 1e3) return `${trim(v / 1e3)}k`;
    return trim(v);
}

function trim(v: number): string {
    return String(Number(v.toFixed(2)));
}

function esc(s: string): string {
    return s
        .replace(/&/g, "&amp;")
        .replace(/</g, "&lt;")
        .replace(/>/g, "&gt;")
        .replace(/"/g, "&quot;");
}

export class Canvas {
    private parts: string[] = [];

    constructor(
        readonly width: number,
        readonly height: number,
    ) {}

    line(x1: number, y1: number, x2: number, y2: number, stroke: string, w = 1) {
        this.parts.push(
            `<line x1="${r(x1)}" y1="${r(y1)}" x2="${r(x2)}" y2="${r(y2)}"` +
            ` stroke="${stroke}" stroke-width="${w}"/>`,
        );
    }

    polyline(pts: [number, number][], stroke: string) {
        const d = pts.map(([x, y]) => `${r(x)},${r(y)}`).join(" ");
        this.parts.push(
            `<polyline points="${d}" fill="none" stroke="${stroke}" stroke-width="2"/>`,
        );
    }

    circle(x: number, y: number, fill: string, radius = 3) {
        this.parts.push(
            `<circle cx="${r(x)}" cy="${r(y)}" r="${radius}" fill="${fill}"/>`,
        );
    }

    rect(x: number, y: number, w: number, h: number, fill: string) {
        this.parts.push(
            `<rect x="${r(x)}" y="${r(y)}" width="${r(w)}" height="${r(h)}" fill="${fill}"/>`,
        );
    }

    text(x: number, y: number, s: string, opts: {
        anchor?: "start" | "middle" | "end";
        size?: number;
        rotate?: number;
    } = {}) {
        const anchor = opts.anchor ?? "start";
        const size = opts.size ?? 11;
        const tr = opts.rotate
            ? ` transform="rotate(${opts.rotate} ${r(x)} ${r(y)})"`
            : "";
        this.parts.push(
            `<text x="${r(x)}" y="${r(y)}" font-family="sans-serif"` +
            ` font-size="${size}" text-anchor="${anchor}"${tr}>${esc(s)}</text>`,
        );
    }

    legend(x: number, y: number, labels: string[]) {
        labels.forEach((label, i) => {
            const ly = y + i * 16;
            this.rect(x, ly - 9, 12, 10, color(i));
            this.text(x + 16, ly, label);
        });
    }

    render(meta: FigureMeta): string {
        const metaJson = esc(JSON.stringify(meta));
        return [
            `<svg xmlns="http://www.w3.org/2000/svg" width="${this.width}"` +
            ` height="${this.height}" viewBox="0 0 ${this.width} ${this.height}">`,
            `<metadata id="figure-meta">${metaJson}</metadata>`,
            `<rect width="${this.width}" height="${this.height}" fill="#ffffff"/>`,
            ...this.parts,
            "</svg>",
            "",
        ].join("\n");
    }
}

function r(v: number): string {
    return String(Number(v.toFixed(2)));
}

export function parseMeta(svg: string): FigureMeta {
    const m = svg.match(/<metadata id="figure-meta">(.*?)<\/metadata>/s);
    if (!m) throw new Error("no figure metadata found");
    const unescaped = m[1]
        .replace(/&quot;/g, '"')
        .replace(/&lt;/g, "<")
        .replace(/&gt;/g, ">")
        .replace(/&amp;/g, "&");
    return JSON.parse(unescaped) as FigureMeta;
}
