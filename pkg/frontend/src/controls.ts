/** Which execution commands are legal in each mode; mirrors the server rules. */

import { Mode } from "./types.js";

export type CommandName = "start" | "pause" | "step" | "continue" | "stop";

const LEGAL: Record<Mode, CommandName[]> = {
    idle: ["start", "step"],
    running: ["pause", "stop"],
    paused: ["continue", "step", "stop"],
};

export function enabledCommands(mode: Mode): Set<CommandName> {
    return new Set(LEGAL[mode]);
}

export function isEnabled(mode: Mode, cmd: CommandName): boolean {
    return LEGAL[mode].includes(cmd);
}

/** Enable/disable a row of control buttons to match the session mode. */
export function applyEnablement(
    buttons: Partial<Record<CommandName, HTMLButtonElement>>,
    mode: Mode,
): void {
    const legal = enabledCommands(mode);
    for (const [name, button] of Object.entries(buttons)) {
        if (button) button.disabled = !legal.has(name as CommandName);
    }
}
