/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_bardemo_free: (a: number, b: number) => void;
export const __wbg_stripdemo_free: (a: number, b: number) => void;
export const bar_stress: (a: number, b: number, c: number, d: number) => [number, number, number, number];
export const bardemo_advance: (a: number, b: number) => [number, number, number];
export const bardemo_cells: (a: number) => [number, number];
export const bardemo_cracked_nodes: (a: number) => number;
export const bardemo_energy: (a: number) => number;
export const bardemo_finished: (a: number) => number;
export const bardemo_new: (a: number, b: number) => [number, number, number];
export const bardemo_phase: (a: number) => [number, number];
export const bardemo_principal_stress_ratio: (a: number) => [number, number];
export const bardemo_t_end: (a: number) => number;
export const bardemo_time: (a: number) => number;
export const bardemo_vertices: (a: number) => [number, number];
export const spall_point: (a: number, b: number, c: number) => [number, number, number, number];
export const stripdemo_advance: (a: number, b: number) => [number, number, number];
export const stripdemo_dg_stress: (a: number) => [number, number, number, number];
export const stripdemo_exact_stress: (a: number) => [number, number];
export const stripdemo_finished: (a: number) => number;
export const stripdemo_new: (a: number, b: number, c: number) => [number, number, number];
export const stripdemo_sample_x: (a: number) => [number, number];
export const stripdemo_time: (a: number) => number;
export const __wbindgen_externrefs: WebAssembly.Table;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
export const __wbindgen_start: () => void;
