/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const budget_sweep: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number, i: number) => [number, number];
export const draw_instance: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number];
export const solve: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number) => [number, number];
export const split_curve: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
