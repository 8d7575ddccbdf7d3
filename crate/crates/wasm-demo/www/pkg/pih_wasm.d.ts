/* tslint:disable */
/* eslint-disable */

export class DemoParams {
    free(): void;
    [Symbol.dispose](): void;
    constructor();
    eta_th: number;
    f_sat: number;
    gamma: number;
    /**
     * Linear gain, mm/N.
     */
    ka_linear: number;
    /**
     * Sigmoid steepness, 1/N.
     */
    ka_sigmoid: number;
    noise_sigma: number;
    /**
     * `true` for the sigmoid law.
     */
    nonlinear: boolean;
    offset_x: number;
    seed: number;
    /**
     * Reference advance per tick, mm.
     */
    speed: number;
    ticks: number;
}

/**
 * One simulated descent onto the rim.
 */
export class ForceTrace {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    /**
     * Window index at which the force was declared settled, or -1.
     */
    readonly convergedWindow: number;
    /**
     * Insertion-axis force per tick, N.
     */
    readonly fz: Float64Array;
    /**
     * First tick with the rim loaded, or -1.
     */
    readonly onsetTick: number;
    readonly ticksPerWindow: number;
    /**
     * Per-window mean of fz, windows anchored at contact onset.
     */
    readonly windowMean: Float64Array;
    readonly windowTwoSigma: Float64Array;
}

/**
 * Runs one episode and the online convergence detector.
 */
export function forceTrace(p: DemoParams): ForceTrace;

/**
 * Samples `α(f)` on `[0, f_max]` at `n` points.
 */
export function sigmoidCurve(ka: number, f_sat: number, f_max: number, n: number): Float64Array;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_demoparams_free: (a: number, b: number) => void;
    readonly __wbg_forcetrace_free: (a: number, b: number) => void;
    readonly __wbg_get_demoparams_eta_th: (a: number) => number;
    readonly __wbg_get_demoparams_f_sat: (a: number) => number;
    readonly __wbg_get_demoparams_gamma: (a: number) => number;
    readonly __wbg_get_demoparams_ka_linear: (a: number) => number;
    readonly __wbg_get_demoparams_ka_sigmoid: (a: number) => number;
    readonly __wbg_get_demoparams_noise_sigma: (a: number) => number;
    readonly __wbg_get_demoparams_nonlinear: (a: number) => number;
    readonly __wbg_get_demoparams_offset_x: (a: number) => number;
    readonly __wbg_get_demoparams_seed: (a: number) => number;
    readonly __wbg_get_demoparams_speed: (a: number) => number;
    readonly __wbg_get_demoparams_ticks: (a: number) => number;
    readonly __wbg_set_demoparams_eta_th: (a: number, b: number) => void;
    readonly __wbg_set_demoparams_f_sat: (a: number, b: number) => void;
    readonly __wbg_set_demoparams_gamma: (a: number, b: number) => void;
    readonly __wbg_set_demoparams_ka_linear: (a: number, b: number) => void;
    readonly __wbg_set_demoparams_ka_sigmoid: (a: number, b: number) => void;
    readonly __wbg_set_demoparams_noise_sigma: (a: number, b: number) => void;
    readonly __wbg_set_demoparams_nonlinear: (a: number, b: number) => void;
    readonly __wbg_set_demoparams_offset_x: (a: number, b: number) => void;
    readonly __wbg_set_demoparams_seed: (a: number, b: number) => void;
    readonly __wbg_set_demoparams_speed: (a: number, b: number) => void;
    readonly __wbg_set_demoparams_ticks: (a: number, b: number) => void;
    readonly demoparams_new: () => number;
    readonly forceTrace: (a: number) => [number, number, number];
    readonly forcetrace_convergedWindow: (a: number) => number;
    readonly forcetrace_fz: (a: number) => [number, number];
    readonly forcetrace_onsetTick: (a: number) => number;
    readonly forcetrace_ticksPerWindow: (a: number) => number;
    readonly forcetrace_windowMean: (a: number) => [number, number];
    readonly forcetrace_windowTwoSigma: (a: number) => [number, number];
    readonly sigmoidCurve: (a: number, b: number, c: number, d: number) => [number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
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
