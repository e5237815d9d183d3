/* tslint:disable */
/* eslint-disable */

/**
 * J on a `steps × steps` grid of the sliced analytic landscape, plus the
 * closed-form slice maxima and minima for every column.
 */
export function analytic_landscape(steps: number, margin: number): string;

/**
 * Boundary-trap check at the upper corner for `κ = scale · π/(√3T)`, with
 * a J profile along the diagonal `ε = t·κ` for `t` in `[−1, 1]`.
 */
export function boundary_trap(horizon: number, segments: number, scale: number, samples: number, seed: number): string;

/**
 * Critical points of `sin`, `sinc` or `cubic` on `[a, b]`.
 */
export function census(_function: string, a: number, b: number, grid_points: number): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly analytic_landscape: (a: number, b: number) => [number, number, number, number];
    readonly boundary_trap: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
    readonly census: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
    readonly __wbindgen_start: () => void;
}

export type SyncInitInput = BufferSource | WebAssembly.Module;

/**
 * Instantiates the given `module`, which can either be bytes or
 * a precompiled `WebAssembly.Module`.
 *
 * @param {{ module: SyncInitInput }} module - Passing `SyncInitInput` directly is deprecated.
 *
 * @returns {InitOutput}
 */
export function initSync(module: { module: SyncInitInput } | SyncInitInput): InitOutput;

/**
 * If `module_or_path` is {RequestInfo} or {URL}, makes a request and
 * for everything else, calls `WebAssembly.instantiate` directly.
 *
 * @param {{ module_or_path: InitInput | Promise<InitInput> }} module_or_path - Passing `InitInput` directly is deprecated.
 *
 * @returns {Promise<InitOutput>}
 */
export default function __wbg_init (module_or_path?: { module_or_path: InitInput | Promise<InitInput> } | InitInput | Promise<InitInput>): Promise<InitOutput>;
