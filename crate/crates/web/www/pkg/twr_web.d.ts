/* tslint:disable */
/* eslint-disable */

/**
 * Minimum-power and full-power solutions over relay budgets `0..=pr_stop`.
 */
export function budget_sweep(alpha1: Float64Array, alpha2: Float64Array, r_ma: number, r_bar_1r: number, r_bar_2r: number, pr_stop: number, points: number): string;

/**
 * Subchannel gains and MA-phase rates of one Rayleigh draw with unit noise.
 */
export function draw_instance(seed: number, n1: number, n2: number, nr: number, p1: number, p2: number): string;

/**
 * Minimum-power relay allocation for one instance.
 */
export function solve(alpha1: Float64Array, alpha2: Float64Array, r_ma: number, r_bar_1r: number, r_bar_2r: number, pr_max: number): string;

/**
 * BC sum-rate as a fixed budget shifts between the two directions.
 */
export function split_curve(alpha1: Float64Array, alpha2: Float64Array, budget: number, points: number): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly budget_sweep: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number, i: number) => [number, number];
    readonly draw_instance: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number];
    readonly solve: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number) => [number, number];
    readonly split_curve: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
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
