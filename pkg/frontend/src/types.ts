/** Shapes of everything the control API serves. The UI renders only this data. */

export type Mode = "idle" | "running" | "paused";

export interface SessionState {
    mode: Mode;
    sim_time_ms: number;
    rt_factor: number;
    pose: { x: number; y: number; theta: number };
    collision_count: number;
    seed?: number;
}

export interface SpikeFrame {
    type: "spikes";
    t: number;
    events: [string, number][];
}

export interface PoseFrame {
    type: "pose";
    t: number;
    x: number;
    y: number;
    theta: number;
    collisions: number;
}

export interface SensorsFrame {
    type: "sensors";
    t: number;
    ps: number[];
    tof: number;
}

export type StateFrame = { type: "state" } & SessionState;

export type EventFrame = SpikeFrame | PoseFrame | SensorsFrame | StateFrame;

export interface GroupInfo {
    id: number;
    name: string;
    size: number;
    kind: string;
    params: { a: number; b: number; c: number; d: number };
}

export interface SynapseInfo {
    id: number;
    pre: [number, number];
    post: [number, number];
    weight: number;
    delay: number;
}

export interface NetworkInfo {
    groups: GroupInfo[];
    synapses: SynapseInfo[];
}

export interface ControlCommand {
    cmd: "start" | "pause" | "step" | "continue" | "stop" | "speed";
    n_ms?: number;
    factor?: number;
}
