/* tslint:disable */
/* eslint-disable */

/**
 * Three-channel colored noise with a burst at `t0`, peak `amplitude` noise
 * standard deviations on the first channel. Returns the noisy channels then
 * the denoised ones, each of length `len` (a power of two ≥ 256).
 */
export function denoise_demo(seed: number, len: number, t0: number, amplitude: number, rule: string): Float64Array;

/**
 * SURE and true loss against λ on one noisy sparse sequence of `n` blocks
 * of `q` channels. Returns `[λ…, SURE…, loss…]` over a linear λ grid on
 * `[0, λ_max]`.
 */
export function sure_curve(seed: number, n: number, q: number, nonzero: number, mu: number, nu: number, s: number, lambda_max: number, points: number): Float64Array;

/**
 * Scalar shrinkage `y ↦ (1 − λ^ν/|y|^ν)_+^s y` on `points` inputs in
 * `[-y_max, y_max]`. Returns inputs then outputs. `s ≤ 0` picks
 * `s = 2 ln ν + 1`.
 */
export function threshold_curve(lambda: number, nu: number, s: number, y_max: number, points: number): Float64Array;

/**
 * Finite-sample universal threshold for `n` blocks of `q` channels.
 */
export function universal_lambda(n: number, q: number): number;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly denoise_demo: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number, number];
    readonly sure_curve: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number, i: number) => [number, number, number, number];
    readonly threshold_curve: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
    readonly universal_lambda: (a: number, b: number) => [number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
    readonly __externref_table_dealloc: (a: number) => void;
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
