import { domainError } from "./errors.js";

/**
 * Permutation maximizing the selected score mass of a square nonnegative
 * matrix; among equally scoring assignments the lexicographically smallest
 * row-to-column mapping wins.  Minimization runs on the negated matrix via
 * shortest augmenting paths with dual potentials; candidate columns in the
 * tie-break pass are pruned through the dual bound, so tie-free inputs cost
 * no extra solves.
 */
export function hungarianAssign(matrix: ArrayLike<number>[], n?: number): Int32Array {
  const size = n ?? matrix.length;
  const cost = readCosts(matrix, size);
  const { colOfRow, u, v } = minCostSolve(cost, size);
  return refineLexicographic(cost, size, colOfRow, u, v, tieTolerance(cost, size));
}

/** Exhaustive oracle with the same objective and tie-break; N <= 9. */
export function bruteForceAssign(matrix: ArrayLike<number>[], n?: number): Int32Array {
  const size = n ?? matrix.length;
  if (size > 9) {
    throw domainError(`brute force refused for N=${size} > 9`);
  }
  const cost = readCosts(matrix, size);
  let best = Number.NEGATIVE_INFINITY;
  const scores: number[] = [];
  const perms: number[][] = [];
  const current = new Array<number>(size);
  const used = new Array<boolean>(size).fill(false);
  const walk = (row: number, acc: number) => {
    if (row === size) {
      perms.push([...current]);
      scores.push(acc);
      if (acc > best) best = acc;
      return;
    }
    for (let c = 0; c < size; c++) {
      if (!used[c]) {
        used[c] = true;
        current[row] = c;
        walk(row + 1, acc - cost[row * size + c]);
        used[c] = false;
      }
    }
  };
  walk(0, 0);
  const tol = tieTolerance(cost, size);
  for (let k = 0; k < perms.length; k++) {
    if (scores[k] >= best - tol) {
      return Int32Array.from(perms[k]);
    }
  }
  throw domainError("unreachable: no permutation met its own maximum");
}

function tieTolerance(cost: Float64Array, n: number): number {
  let maxAbs = 0;
  for (let k = 0; k < cost.length; k++) {
    const mag = Math.abs(cost[k]);
    if (mag > maxAbs) maxAbs = mag;
  }
  return 1e-12 * Math.max(1, maxAbs * n);
}

function readCosts(matrix: ArrayLike<number>[], n: number): Float64Array {
  if (n < 1 || matrix.length !== n) {
    throw domainError(`score matrix must be square and nonempty, got ${matrix.length} rows`);
  }
  const cost = new Float64Array(n * n);
  for (let i = 0; i < n; i++) {
    const row = matrix[i];
    if (row.length !== n) {
      throw domainError(`row ${i} has ${row.length} entries, expected ${n}`);
    }
    for (let j = 0; j < n; j++) {
      const value = row[j];
      if (!Number.isFinite(value)) {
        throw domainError("score matrix contains NaN or infinite entries");
      }
      if (value < 0) {
        throw domainError("score matrix contains negative entries");
      }
      cost[i * n + j] = -value;
    }
  }
  return cost;
}

interface SolveResult {
  colOfRow: Int32Array;
  u: Float64Array;
  v: Float64Array;
}

function minCostSolve(cost: Float64Array, n: number): SolveResult {
  const u = new Float64Array(n + 1);
  const v = new Float64Array(n + 1);
  const match = new Int32Array(n + 1);
  const minv = new Float64Array(n + 1);
  const way = new Int32Array(n + 1);
  const used = new Uint8Array(n + 1);
  for (let i = 1; i <= n; i++) {
    match[0] = i;
    let j0 = 0;
    minv.fill(Number.POSITIVE_INFINITY);
    way.fill(0);
    used.fill(0);
    for (;;) {
      used[j0] = 1;
      const i0 = match[j0];
      let delta = Number.POSITIVE_INFINITY;
      let j1 = -1;
      for (let j = 1; j <= n; j++) {
        if (used[j]) continue;
        const cur = cost[(i0 - 1) * n + (j - 1)] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (let j = 0; j <= n; j++) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
      if (match[j0] === 0) break;
    }
    while (j0 !== 0) {
      const j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    }
  }
  const colOfRow = new Int32Array(n);
  for (let j = 1; j <= n; j++) {
    colOfRow[match[j] - 1] = j - 1;
  }
  return { colOfRow, u: u.subarray(1), v: v.subarray(1) };
}

function refineLexicographic(
  cost: Float64Array,
  n: number,
  sigma: Int32Array,
  u: Float64Array,
  v: Float64Array,
  tol: number,
): Int32Array {
  let total = 0;
  for (let i = 0; i < n; i++) total += cost[i * n + sigma[i]];
  let duals = 0;
  for (let i = 0; i < n; i++) duals += u[i] + v[i];
  const slackBudget = total - duals + tol;
  const taken = new Uint8Array(n);
  let prefix = 0;
  let current = sigma;
  for (let i = 0; i < n; i++) {
    for (let c = 0; c < current[i]; c++) {
      if (taken[c]) continue;
      if (cost[i * n + c] - u[i] - v[c] > slackBudget) continue;
      const subRows: number[] = [];
      for (let r = i + 1; r < n; r++) subRows.push(r);
      const subCols: number[] = [];
      for (let col = 0; col < n; col++) {
        if (!taken[col] && col !== c) subCols.push(col);
      }
      let forced = prefix + cost[i * n + c];
      let subSigma: Int32Array | null = null;
      if (subRows.length > 0) {
        const m = subRows.length;
        const subCost = new Float64Array(m * m);
        for (let r = 0; r < m; r++) {
          for (let col = 0; col < m; col++) {
            subCost[r * m + col] = cost[subRows[r] * n + subCols[col]];
          }
        }
        subSigma = minCostSolve(subCost, m).colOfRow;
        for (let r = 0; r < m; r++) {
          forced += cost[subRows[r] * n + subCols[subSigma[r]]];
        }
      }
      if (forced <= total + tol) {
        const next = Int32Array.from(current);
        next[i] = c;
        if (subSigma) {
          for (let r = 0; r < subRows.length; r++) {
            next[subRows[r]] = subCols[subSigma[r]];
          }
        }
        current = next;
        break;
      }
    }
    taken[current[i]] = 1;
    prefix += cost[i * n + current[i]];
  }
  return current;
}
