//! Named states, channels, observables and small literal values.

use spacetime_core::channels::{
    amplitude_damping, dephasing, depolarizing, phase_flip, KrausChannel,
};
use spacetime_core::operator_algebra::{c, hadamard, identity, ket, outer, pauli};
use spacetime_core::{CMatrix, C64};

use crate::error::{invalid, CliResult};

/// Single-qubit state: `zero`, `one`, `plus`, `minus`, `plus-i`, `minus-i`,
/// `mixed`, or a Bloch vector `bloch:x,y,z`.
pub fn qubit_state(name: &str) -> CliResult<CMatrix> {
    let bloch = match name {
        "zero" => [0.0, 0.0, 1.0],
        "one" => [0.0, 0.0, -1.0],
        "plus" => [1.0, 0.0, 0.0],
        "minus" => [-1.0, 0.0, 0.0],
        "plus-i" => [0.0, 1.0, 0.0],
        "minus-i" => [0.0, -1.0, 0.0],
        "mixed" => [0.0, 0.0, 0.0],
        other => {
            let v = other
                .strip_prefix("bloch:")
                .ok_or_else(|| invalid(format!("unknown state '{other}'")))
                .and_then(float_list)?;
            let [x, y, z] = <[f64; 3]>::try_from(v)
                .map_err(|_| invalid("bloch vector needs three components"))?;
            if x * x + y * y + z * z > 1.0 + 1e-12 {
                return Err(invalid(format!(
                    "bloch vector {name} lies outside the unit ball"
                )));
            }
            [x, y, z]
        }
    };
    let mut rho = identity(2);
    for (k, r) in bloch.into_iter().enumerate() {
        rho += pauli(k as u8 + 1) * c(r);
    }
    Ok(rho * c(0.5))
}

/// Qubit map by name; noisy maps take their strength from `p`.
pub fn qubit_channel(name: &str, p: f64) -> CliResult<KrausChannel> {
    let unitary = |u: CMatrix| KrausChannel::unitary(u).map_err(Into::into);
    match name {
        "identity" => Ok(KrausChannel::identity(2)),
        "hadamard" => unitary(hadamard()),
        "x" | "X" => unitary(pauli(1)),
        "y" | "Y" => unitary(pauli(2)),
        "z" | "Z" => unitary(pauli(3)),
        "depolarizing" => Ok(depolarizing(p)?),
        "dephasing" => Ok(dephasing(p)?),
        "phase-flip" => Ok(phase_flip(p)?),
        "amplitude-damping" => Ok(amplitude_damping(p)?),
        other => Err(invalid(format!(
            "unknown channel '{other}' (identity, hadamard, x, y, z, depolarizing, dephasing, phase-flip, amplitude-damping)"
        ))),
    }
}

pub fn qubit_unitary(name: &str) -> CliResult<CMatrix> {
    match name {
        "identity" => Ok(identity(2)),
        "hadamard" => Ok(hadamard()),
        "x" | "X" => Ok(pauli(1)),
        "y" | "Y" => Ok(pauli(2)),
        "z" | "Z" => Ok(pauli(3)),
        other => Err(invalid(format!(
            "unknown unitary '{other}' (identity, hadamard, x, y, z)"
        ))),
    }
}

/// Pauli label `I`, `X`, `Y` or `Z` (case-insensitive).
pub fn pauli_index(label: &str) -> CliResult<u8> {
    match label.to_ascii_uppercase().as_str() {
        "I" => Ok(0),
        "X" => Ok(1),
        "Y" => Ok(2),
        "Z" => Ok(3),
        other => Err(invalid(format!("'{other}' is not a Pauli label"))),
    }
}

pub fn observable(label: &str) -> CliResult<CMatrix> {
    pauli_index(label).map(pauli)
}

/// Comma-separated list of names; empty entries are rejected.
pub fn names(list: &str) -> CliResult<Vec<&str>> {
    let items: Vec<&str> = list.split(',').map(str::trim).collect();
    if items.iter().any(|s| s.is_empty()) {
        return Err(invalid(format!("empty entry in list '{list}'")));
    }
    Ok(items)
}

pub fn float_list(list: &str) -> CliResult<Vec<f64>> {
    names(list)?
        .into_iter()
        .map(|s| {
            s.parse::<f64>()
                .map_err(|_| invalid(format!("'{s}' is not a number")))
        })
        .collect()
}

/// Complex number `re,im` or a bare real `re`.
pub fn complex(s: &str) -> CliResult<C64> {
    match float_list(s)?.as_slice() {
        [re] => Ok(C64::new(*re, 0.0)),
        [re, im] => Ok(C64::new(*re, *im)),
        _ => Err(invalid(format!("'{s}' is not a complex number 're,im'"))),
    }
}

/// Real matrix written row by row, rows separated by `;`.
pub fn real_matrix(s: &str) -> CliResult<Vec<Vec<f64>>> {
    let rows = s
        .split(';')
        .map(float_list)
        .collect::<CliResult<Vec<_>>>()?;
    let n = rows.first().map_or(0, Vec::len);
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(invalid("matrix rows must be non-empty and of equal length"));
    }
    Ok(rows)
}

/// Fock-space state: `vacuum`, `fock:k` or `coherent:re,im`.
pub fn fock_state(name: &str, n_max: usize) -> CliResult<CMatrix> {
    if name == "vacuum" {
        return Ok(outer(&ket(n_max, 0)));
    }
    if let Some(k) = name.strip_prefix("fock:") {
        let k: usize = k
            .parse()
            .map_err(|_| invalid(format!("bad Fock level in '{name}'")))?;
        if k >= n_max {
            return Err(invalid(format!("Fock level {k} needs n_max > {k}")));
        }
        return Ok(outer(&ket(n_max, k)));
    }
    if let Some(a) = name.strip_prefix("coherent:") {
        let alpha = complex(a)?;
        let mut v = spacetime_core::cv_wigner::coherent_state(alpha, n_max);
        v /= c(v.norm());
        return Ok(outer(&v));
    }
    Err(invalid(format!(
        "unknown mode state '{name}' (vacuum, fock:k, coherent:re,im)"
    )))
}
