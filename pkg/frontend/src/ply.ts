/** Minimal ascii PLY writer for uploading clouds to the service. */

export function writeAsciiPly(
  positions: ArrayLike<number>,
  labels?: ArrayLike<number>,
): string {
  const n = Math.floor(positions.length / 3);
  if (labels && labels.length !== n) {
    throw new Error(`expected ${n} labels, got ${labels.length}`);
  }
  const header = [
    "ply",
    "format ascii 1.0",
    `element vertex ${n}`,
    "property float x",
    "property float y",
    "property float z",
    ...(labels ? ["property int region"] : []),
    "end_header",
  ];
  const rows: string[] = [];
  for (let i = 0; i < n; i++) {
    let row = `${positions[3 * i]} ${positions[3 * i + 1]} ${positions[3 * i + 2]}`;
    if (labels) row += ` ${labels[i]}`;
    rows.push(row);
  }
  return header.join("\n") + "\n" + rows.join("\n") + "\n";
}
