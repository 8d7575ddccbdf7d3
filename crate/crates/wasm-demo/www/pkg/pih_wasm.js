/* @ts-self-types="./pih_wasm.d.ts" */

export class DemoParams {
    __destroy_into_raw() {
        const ptr = this.__wbg_ptr;
        this.__wbg_ptr = 0;
        DemoParamsFinalization.unregister(this);
        return ptr;
    }
    free() {
        const ptr = this.__destroy_into_raw();
        wasm.__wbg_demoparams_free(ptr, 0);
    }
    constructor() {
        const ret = wasm.demoparams_new();
        this.__wbg_ptr = ret;
        DemoParamsFinalization.register(this, this.__wbg_ptr, this);
        return this;
    }
    /**
     * @returns {number}
     */
    get eta_th() {
        const ret = wasm.__wbg_get_demoparams_eta_th(this.__wbg_ptr);
        return ret;
    }
    /**
     * @returns {number}
     */
    get f_sat() {
        const ret = wasm.__wbg_get_demoparams_f_sat(this.__wbg_ptr);
        return ret;
    }
    /**
     * @returns {number}
     */
    get gamma() {
        const ret = wasm.__wbg_get_demoparams_gamma(this.__wbg_ptr);
        return ret;
    }
    /**
     * Linear gain, mm/N.
     * @returns {number}
     */
    get ka_linear() {
        const ret = wasm.__wbg_get_demoparams_ka_linear(this.__wbg_ptr);
        return ret;
    }
    /**
     * Sigmoid steepness, 1/N.
     * @returns {number}
     */
    get ka_sigmoid() {
        const ret = wasm.__wbg_get_demoparams_ka_sigmoid(this.__wbg_ptr);
        return ret;
    }
    /**
     * @returns {number}
     */
    get noise_sigma() {
        const ret = wasm.__wbg_get_demoparams_noise_sigma(this.__wbg_ptr);
        return ret;
    }
    /**
     * `true` for the sigmoid law.
     * @returns {boolean}
     */
    get nonlinear() {
        const ret = wasm.__wbg_get_demoparams_nonlinear(this.__wbg_ptr);
        return ret !== 0;
    }
    /**
     * @returns {number}
     */
    get offset_x() {
        const ret = wasm.__wbg_get_demoparams_offset_x(this.__wbg_ptr);
        return ret;
    }
    /**
     * @returns {number}
     */
    get seed() {
        const ret = wasm.__wbg_get_demoparams_seed(this.__wbg_ptr);
        return ret >>> 0;
    }
    /**
     * Reference advance per tick, mm.
     * @returns {number}
     */
    get speed() {
        const ret = wasm.__wbg_get_demoparams_speed(this.__wbg_ptr);
        return ret;
    }
    /**
     * @returns {number}
     */
    get ticks() {
        const ret = wasm.__wbg_get_demoparams_ticks(this.__wbg_ptr);
        return ret >>> 0;
    }
    /**
     * @param {number} arg0
     */
    set eta_th(arg0) {
        wasm.__wbg_set_demoparams_eta_th(this.__wbg_ptr, arg0);
    }
    /**
     * @param {number} arg0
     */
    set f_sat(arg0) {
        wasm.__wbg_set_demoparams_f_sat(this.__wbg_ptr, arg0);
    }
    /**
     * @param {number} arg0
     */
    set gamma(arg0) {
        wasm.__wbg_set_demoparams_gamma(this.__wbg_ptr, arg0);
    }
    /**
     * Linear gain, mm/N.
     * @param {number} arg0
     */
    set ka_linear(arg0) {
        wasm.__wbg_set_demoparams_ka_linear(this.__wbg_ptr, arg0);
    }
    /**
     * Sigmoid steepness, 1/N.
     * @param {number} arg0
     */
    set ka_sigmoid(arg0) {
        wasm.__wbg_set_demoparams_ka_sigmoid(this.__wbg_ptr, arg0);
    }
    /**
     * @param {number} arg0
     */
    set noise_sigma(arg0) {
        wasm.__wbg_set_demoparams_noise_sigma(this.__wbg_ptr, arg0);
    }
    /**
     * `true` for the sigmoid law.
     * @param {boolean} arg0
     */
    set nonlinear(arg0) {
        wasm.__wbg_set_demoparams_nonlinear(this.__wbg_ptr, arg0);
    }
    /**
     * @param {number} arg0
     */
    set offset_x(arg0) {
        wasm.__wbg_set_demoparams_offset_x(this.__wbg_ptr, arg0);
    }
    /**
     * @param {number} arg0
     */
    set seed(arg0) {
        wasm.__wbg_set_demoparams_seed(this.__wbg_ptr, arg0);
    }
    /**
     * Reference advance per tick, mm.
     * @param {number} arg0
     */
    set speed(arg0) {
        wasm.__wbg_set_demoparams_speed(this.__wbg_ptr, arg0);
    }
    /**
     * @param {number} arg0
     */
    set ticks(arg0) {
        wasm.__wbg_set_demoparams_ticks(this.__wbg_ptr, arg0);
    }
}
if (Symbol.dispose) DemoParams.prototype[Symbol.dispose] = DemoParams.prototype.free;

/**
 * One simulated descent onto the rim.
 */
export class ForceTrace {
    static __wrap(ptr) {
        const obj = Object.create(ForceTrace.prototype);
        obj.__wbg_ptr = ptr;
        ForceTraceFinalization.register(obj, obj.__wbg_ptr, obj);
        return obj;
    }
    __destroy_into_raw() {
        const ptr = this.__wbg_ptr;
        this.__wbg_ptr = 0;
        ForceTraceFinalization.unregister(this);
        return ptr;
    }
    free() {
        const ptr = this.__destroy_into_raw();
        wasm.__wbg_forcetrace_free(ptr, 0);
    }
    /**
     * Window index at which the force was declared settled, or -1.
     * @returns {number}
     */
    get convergedWindow() {
        const ret = wasm.forcetrace_convergedWindow(this.__wbg_ptr);
        return ret;
    }
    /**
     * Insertion-axis force per tick, N.
     * @returns {Float64Array}
     */
    get fz() {
        const ret = wasm.forcetrace_fz(this.__wbg_ptr);
        var v1 = getArrayF64FromWasm0(ret[0], ret[1]).slice();
        wasm.__wbindgen_free(ret[0], ret[1] * 8, 8);
        return v1;
    }
    /**
     * First tick with the rim loaded, or -1.
     * @returns {number}
     */
    get onsetTick() {
        const ret = wasm.forcetrace_onsetTick(this.__wbg_ptr);
        return ret;
    }
    /**
     * @returns {number}
     */
    get ticksPerWindow() {
        const ret = wasm.forcetrace_ticksPerWindow(this.__wbg_ptr);
        return ret >>> 0;
    }
    /**
     * Per-window mean of fz, windows anchored at contact onset.
     * @returns {Float64Array}
     */
    get windowMean() {
        const ret = wasm.forcetrace_windowMean(this.__wbg_ptr);
        var v1 = getArrayF64FromWasm0(ret[0], ret[1]).slice();
        wasm.__wbindgen_free(ret[0], ret[1] * 8, 8);
        return v1;
    }
    /**
     * @returns {Float64Array}
     */
    get windowTwoSigma() {
        const ret = wasm.forcetrace_windowTwoSigma(this.__wbg_ptr);
        var v1 = getArrayF64FromWasm0(ret[0], ret[1]).slice();
        wasm.__wbindgen_free(ret[0], ret[1] * 8, 8);
        return v1;
    }
}
if (Symbol.dispose) ForceTrace.prototype[Symbol.dispose] = ForceTrace.prototype.free;

/**
 * Runs one episode and the online convergence detector.
 * @param {DemoParams} p
 * @returns {ForceTrace}
 */
export function forceTrace(p) {
    _assertClass(p, DemoParams);
    const ret = wasm.forceTrace(p.__wbg_ptr);
    if (ret[2]) {
        throw takeFromExternrefTable0(ret[1]);
    }
    return ForceTrace.__wrap(ret[0]);
}

/**
 * Samples `α(f)` on `[0, f_max]` at `n` points.
 * @param {number} ka
 * @param {number} f_sat
 * @param {number} f_max
 * @param {number} n
 * @returns {Float64Array}
 */
export function sigmoidCurve(ka, f_sat, f_max, n) {
    const ret = wasm.sigmoidCurve(ka, f_sat, f_max, n);
    var v1 = getArrayF64FromWasm0(ret[0], ret[1]).slice();
    wasm.__wbindgen_free(ret[0], ret[1] * 8, 8);
    return v1;
}
function __wbg_get_imports() {
    const import0 = {
        __proto__: null,
        __wbg_Error_30c8987f7c2ed4e2: function(arg0, arg1) {
            const ret = Error(getStringFromWasm0(arg0, arg1));
            return ret;
        },
        __wbg___wbindgen_throw_41e9ee4f547fc59a: function(arg0, arg1) {
            throw new Error(getStringFromWasm0(arg0, arg1));
        },
        __wbindgen_init_externref_table: function() {
            const table = wasm.__wbindgen_externrefs;
            const offset = table.grow(4);
            table.set(0, undefined);
            table.set(offset + 0, undefined);
            table.set(offset + 1, null);
            table.set(offset + 2, true);
            table.set(offset + 3, false);
        },
    };
    return {
        __proto__: null,
        "./pih_wasm_bg.js": import0,
    };
}

const DemoParamsFinalization = (typeof FinalizationRegistry === 'undefined')
    ? { register: () => {}, unregister: () => {} }
    : new FinalizationRegistry(ptr => wasm.__wbg_demoparams_free(ptr, 1));
const ForceTraceFinalization = (typeof FinalizationRegistry === 'undefined')
    ? { register: () => {}, unregister: () => {} }
    : new FinalizationRegistry(ptr => wasm.__wbg_forcetrace_free(ptr, 1));

function _assertClass(instance, klass) {
    if (!(instance instanceof klass)) {
        throw new Error(`expected instance of ${klass.name}`);
    }
}

function getArrayF64FromWasm0(ptr, len) {
    ptr = ptr >>> 0;
    return getFloat64ArrayMemory0().subarray(ptr / 8, ptr / 8 + len);
}

let cachedFloat64ArrayMemory0 = null;
function getFloat64ArrayMemory0() {
    if (cachedFloat64ArrayMemory0 === null || cachedFloat64ArrayMemory0.byteLength === 0) {
        cachedFloat64ArrayMemory0 = new Float64Array(wasm.memory.buffer);
    }
    return cachedFloat64ArrayMemory0;
}

function getStringFromWasm0(ptr, len) {
    return decodeText(ptr >>> 0, len);
}

let cachedUint8ArrayMemory0 = null;
function getUint8ArrayMemory0() {
    if (cachedUint8ArrayMemory0 === null || cachedUint8ArrayMemory0.byteLength === 0) {
        cachedUint8ArrayMemory0 = new Uint8Array(wasm.memory.buffer);
    }
    return cachedUint8ArrayMemory0;
}

function takeFromExternrefTable0(idx) {
    const value = wasm.__wbindgen_externrefs.get(idx);
    wasm.__externref_table_dealloc(idx);
    return value;
}

let cachedTextDecoder = new TextDecoder('utf-8', { ignoreBOM: true, fatal: true });
cachedTextDecoder.decode();
const MAX_SAFARI_DECODE_BYTES = 2146435072;
let numBytesDecoded = 0;
function decodeText(ptr, len) {
    numBytesDecoded += len;
    if (numBytesDecoded >= MAX_SAFARI_DECODE_BYTES) {
        cachedTextDecoder = new TextDecoder('utf-8', { ignoreBOM: true, fatal: true });
        cachedTextDecoder.decode();
        numBytesDecoded = len;
    }
    return cachedTextDecoder.decode(getUint8ArrayMemory0().subarray(ptr, ptr + len));
}

let wasmModule, wasmInstance, wasm;
function __wbg_finalize_init(instance, module) {
    wasmInstance = instance;
    wasm = instance.exports;
    wasmModule = module;
    cachedFloat64ArrayMemory0 = null;
    cachedUint8ArrayMemory0 = null;
    wasm.__wbindgen_start();
    return wasm;
}

async function __wbg_load(module, imports) {
    if (typeof Response === 'function' && module instanceof Response) {
        if (!module.ok) {
            throw new Error(`failed to fetch Wasm: ${module.status} ${module.statusText} fetching '${module.url}'`);
        }

        if (typeof WebAssembly.instantiateStreaming === 'function') {
            try {
                return await WebAssembly.instantiateStreaming(module, imports);
            } catch (e) {
                const validResponse = expectedResponseType(module.type);

                if (validResponse && module.headers.get('Content-Type') !== 'application/wasm') {
                    console.warn("`WebAssembly.instantiateStreaming` failed because your server does not serve Wasm with `application/wasm` MIME type. Falling back to `WebAssembly.instantiate` which is slower. Original error:\n", e);

                } else { throw e; }
            }
        }

        const bytes = await module.arrayBuffer();
        return await WebAssembly.instantiate(bytes, imports);
    } else {
        const instance = await WebAssembly.instantiate(module, imports);

        if (instance instanceof WebAssembly.Instance) {
            return { instance, module };
        } else {
            return instance;
        }
    }

    function expectedResponseType(type) {
        switch (type) {
            case 'basic': case 'cors': case 'default': return true;
        }
        return false;
    }
}

function initSync(module) {
    if (wasm !== undefined) return wasm;


    if (module !== undefined) {
        if (Object.getPrototypeOf(module) === Object.prototype) {
            ({module} = module)
        } else {
            console.warn('using deprecated parameters for `initSync()`; pass a single object instead')
        }
    }

    const imports = __wbg_get_imports();
    if (!(module instanceof WebAssembly.Module)) {
        module = new WebAssembly.Module(module);
    }
    const instance = new WebAssembly.Instance(module, imports);
    return __wbg_finalize_init(instance, module);
}

async function __wbg_init(module_or_path) {
    if (wasm !== undefined) return wasm;


    if (module_or_path !== undefined) {
        if (Object.getPrototypeOf(module_or_path) === Object.prototype) {
            ({module_or_path} = module_or_path)
        } else {
            console.warn('using deprecated parameters for the initialization function; pass a single object instead')
        }
    }

    if (module_or_path === undefined) {
        module_or_path = new URL('pih_wasm_bg.wasm', import.meta.url);
    }
    const imports = __wbg_get_imports();

    if (typeof module_or_path === 'string' || (typeof Request === 'function' && module_or_path instanceof Request) || (typeof URL === 'function' && module_or_path instanceof URL)) {
        module_or_path = fetch(module_or_path);
    }

    const { instance, module } = await __wbg_load(await module_or_path, imports);

    return __wbg_finalize_init(instance, module);
}

export { initSync, __wbg_init as default };
