/* tslint:disable */
/* eslint-disable */

export class BarDemo {
    free(): void;
    [Symbol.dispose](): void;
    advance(steps: number): number;
    /**
     * Four vertex indices per cell, counterclockwise.
     */
    cells(): Uint32Array;
    cracked_nodes(): number;
    energy(): number;
    finished(): boolean;
    /**
     * `overrides` is config text applied on top of the
     * `curved-bar-2d-calibrated` preset.
     */
    constructor(overrides: string);
    /**
     * Phase field per vertex.
     */
    phase(): Float64Array;
    principal_stress_ratio(): Float64Array;
    t_end(): number;
    time(): number;
    /**
     * `x, y` per vertex.
     */
    vertices(): Float64Array;
}

export class StripDemo {
    free(): void;
    [Symbol.dispose](): void;
    advance(steps: number): number;
    /**
     * Computed `s11` on the strip mid line.
     */
    dg_stress(): Float64Array;
    /**
     * Bar solution at the same points.
     */
    exact_stress(): Float64Array;
    finished(): boolean;
    /**
     * `overrides` is config text applied on top of the `quasi-1d-strip` preset.
     */
    constructor(overrides: string, samples: number);
    sample_x(): Float64Array;
    time(): number;
}

/**
 * Stress of the unit bar on `samples` points at time `t`.
 */
export function bar_stress(width: number, length: number, t: number, samples: number): Float64Array;

/**
 * `[x, t, distance from the free end]`, empty if the threshold is never
 * reached.
 */
export function spall_point(sigma_c: number, width: number, length: number): Float64Array;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_bardemo_free: (a: number, b: number) => void;
    readonly __wbg_stripdemo_free: (a: number, b: number) => void;
    readonly bar_stress: (a: number, b: number, c: number, d: number) => [number, number, number, number];
    readonly bardemo_advance: (a: number, b: number) => [number, number, number];
    readonly bardemo_cells: (a: number) => [number, number];
    readonly bardemo_cracked_nodes: (a: number) => number;
    readonly bardemo_energy: (a: number) => number;
    readonly bardemo_finished: (a: number) => number;
    readonly bardemo_new: (a: number, b: number) => [number, number, number];
    readonly bardemo_phase: (a: number) => [number, number];
    readonly bardemo_principal_stress_ratio: (a: number) => [number, number];
    readonly bardemo_t_end: (a: number) => number;
    readonly bardemo_time: (a: number) => number;
    readonly bardemo_vertices: (a: number) => [number, number];
    readonly spall_point: (a: number, b: number, c: number) => [number, number, number, number];
    readonly stripdemo_advance: (a: number, b: number) => [number, number, number];
    readonly stripdemo_dg_stress: (a: number) => [number, number, number, number];
    readonly stripdemo_exact_stress: (a: number) => [number, number];
    readonly stripdemo_finished: (a: number) => number;
    readonly stripdemo_new: (a: number, b: number, c: number) => [number, number, number];
    readonly stripdemo_sample_x: (a: number) => [number, number];
    readonly stripdemo_time: (a: number) => number;
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
