/* tslint:disable */
/* eslint-disable */

/**
 * Random field; the result carries positions, priors and the arc count.
 */
export function generate(sensors: number, locations: number, radius: number, seed: number): string;

/**
 * Greedy allocation; with `hetero` each sensor/location pair gets its own
 * detection probability and no exact optimum is reported.
 */
export function solve_greedy(field_json: string, radius: number, budget: number, hetero: boolean): string;

/**
 * Optimal allocation at `radius` with `budget` units per sensor, checked
 * against its dual certificate.
 */
export function solve_optimal(field_json: string, radius: number, budget: number): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly generate: (a: number, b: number, c: number, d: number) => [number, number];
    readonly solve_greedy: (a: number, b: number, c: number, d: number, e: number) => [number, number];
    readonly solve_optimal: (a: number, b: number, c: number, d: number) => [number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
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
