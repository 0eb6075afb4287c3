/** Parser for the runtime's exported spike CSV (t_ms,group,neuron). */

export interface SpikeRow {
    t: number;
    group: string;
    neuron: number;
}

export function parseSpikesCsv(text: string): SpikeRow[] {
    const lines = text.split("\n").filter((line) => line.length > 0);
    if (lines[0] !== "t_ms,group,neuron") {
        throw new Error(`unexpected spike CSV header: ${lines[0]}`);
    }
    return lines.slice(1).map((line) => {
        const [t, group, neuron] = line.split(",");
        return { t: Number(t), group, neuron: Number(neuron) };
    });
}
