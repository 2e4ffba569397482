/* tslint:disable */
/* eslint-disable */

/**
 * LP bracket for `m` Fibonacci qubit measurements, with the exact value when `oracle` is set.
 */
export function fibonacci_bracket(m: number, kind: string, size: number, oracle: boolean): string;

/**
 * LP bracket for coplanar measurements over a regular polygon, next to the closed form.
 */
export function planar_bracket(angles: string, sides: number): string;

/**
 * Vertex count, facet count, shrinking factor and Bloch vectors of a qubit polytope.
 * `kind` is `rational` (size = q), `icosphere` (size = level) or `fibonacci` (size = n).
 */
export function polytope_summary(kind: string, size: number): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly fibonacci_bracket: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
    readonly planar_bracket: (a: number, b: number, c: number) => [number, number, number, number];
    readonly polytope_summary: (a: number, b: number, c: number) => [number, number, number, number];
    readonly __externref_table_alloc: () => number;
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
