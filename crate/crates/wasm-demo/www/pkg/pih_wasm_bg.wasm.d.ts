/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_demoparams_free: (a: number, b: number) => void;
export const __wbg_forcetrace_free: (a: number, b: number) => void;
export const __wbg_get_demoparams_eta_th: (a: number) => number;
export const __wbg_get_demoparams_f_sat: (a: number) => number;
export const __wbg_get_demoparams_gamma: (a: number) => number;
export const __wbg_get_demoparams_ka_linear: (a: number) => number;
export const __wbg_get_demoparams_ka_sigmoid: (a: number) => number;
export const __wbg_get_demoparams_noise_sigma: (a: number) => number;
export const __wbg_get_demoparams_nonlinear: (a: number) => number;
export const __wbg_get_demoparams_offset_x: (a: number) => number;
export const __wbg_get_demoparams_seed: (a: number) => number;
export const __wbg_get_demoparams_speed: (a: number) => number;
export const __wbg_get_demoparams_ticks: (a: number) => number;
export const __wbg_set_demoparams_eta_th: (a: number, b: number) => void;
export const __wbg_set_demoparams_f_sat: (a: number, b: number) => void;
export const __wbg_set_demoparams_gamma: (a: number, b: number) => void;
export const __wbg_set_demoparams_ka_linear: (a: number, b: number) => void;
export const __wbg_set_demoparams_ka_sigmoid: (a: number, b: number) => void;
export const __wbg_set_demoparams_noise_sigma: (a: number, b: number) => void;
export const __wbg_set_demoparams_nonlinear: (a: number, b: number) => void;
export const __wbg_set_demoparams_offset_x: (a: number, b: number) => void;
export const __wbg_set_demoparams_seed: (a: number, b: number) => void;
export const __wbg_set_demoparams_speed: (a: number, b: number) => void;
export const __wbg_set_demoparams_ticks: (a: number, b: number) => void;
export const demoparams_new: () => number;
export const forceTrace: (a: number) => [number, number, number];
export const forcetrace_convergedWindow: (a: number) => number;
export const forcetrace_fz: (a: number) => [number, number];
export const forcetrace_onsetTick: (a: number) => number;
export const forcetrace_ticksPerWindow: (a: number) => number;
export const forcetrace_windowMean: (a: number) => [number, number];
export const forcetrace_windowTwoSigma: (a: number) => [number, number];
export const sigmoidCurve: (a: number, b: number, c: number, d: number) => [number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
