//! JSON literals for matrices, algebras, states, maps and variant payloads.
//!
//! A complex entry is a number, a `[re, im]` pair, or a string such as
//! `"1-2i"`. Matrices are arrays of rows.

use serde_json::{json, Map, Value};

use crate::cstar::{AlgebraElement, AlgebraMap, FiniteCStarAlgebra, State};
use crate::error::{Error, Result};
use crate::gns::GnsSpace;
use crate::harness::{
    CStarPayload, LatticeField, ModulePayload, OperatorPayload, SemigroupPayload,
};
use crate::hilbert_module::{DominatedPair, PreHilbertModule};
use crate::linalg::{CMat, CVec, Complex};
use crate::sequences::parse::parse_complex;

fn err(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

/// Parses JSON text.
pub fn parse_json(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| err(format!("invalid JSON: {e}")))
}

pub fn complex(v: &Value) -> Result<Complex> {
    match v {
        Value::Number(n) => Ok(Complex::new(
            n.as_f64().ok_or_else(|| err("bad number"))?,
            0.0,
        )),
        Value::Array(a) if a.len() == 2 && a.iter().all(Value::is_number) => {
            Ok(Complex::new(a[0].as_f64().unwrap(), a[1].as_f64().unwrap()))
        }
        Value::String(s) => parse_complex(s),
        other => Err(err(format!("expected a complex number, found {other}"))),
    }
}

fn array<'a>(v: &'a Value, what: &str) -> Result<&'a Vec<Value>> {
    v.as_array()
        .ok_or_else(|| err(format!("{what} must be an array, found {v}")))
}

pub fn vector(v: &Value) -> Result<CVec> {
    let items = array(v, "vector")?;
    if items.is_empty() {
        return Err(err("empty vector"));
    }
    Ok(CVec::from_vec(
        items.iter().map(complex).collect::<Result<_>>()?,
    ))
}

pub fn reals(v: &Value) -> Result<Vec<f64>> {
    array(v, "real list")?
        .iter()
        .map(|x| {
            x.as_f64()
                .ok_or_else(|| err(format!("expected a real number, found {x}")))
        })
        .collect()
}

pub fn naturals(v: &Value) -> Result<Vec<u64>> {
    array(v, "integer list")?
        .iter()
        .map(|x| {
            x.as_u64()
                .ok_or_else(|| err(format!("expected a nonnegative integer, found {x}")))
        })
        .collect()
}

pub fn matrix(v: &Value) -> Result<CMat> {
    let rows = array(v, "matrix")?;
    if rows.is_empty() {
        return Err(err("empty matrix"));
    }
    let parsed: Vec<Vec<Complex>> = rows
        .iter()
        .map(|r| array(r, "matrix row")?.iter().map(complex).collect())
        .collect::<Result<_>>()?;
    let cols = parsed[0].len();
    if cols == 0 || parsed.iter().any(|r| r.len() != cols) {
        return Err(err("matrix rows must be nonempty and of equal length"));
    }
    Ok(CMat::from_fn(parsed.len(), cols, |i, j| parsed[i][j]))
}

/// Encodes a matrix as rows of `[re, im]` pairs.
pub fn matrix_value(m: &CMat) -> Value {
    Value::Array(
        (0..m.nrows())
            .map(|i| {
                Value::Array(
                    (0..m.ncols())
                        .map(|j| json!([m[(i, j)].re, m[(i, j)].im]))
                        .collect(),
                )
            })
            .collect(),
    )
}

pub fn vector_value(v: &CVec) -> Value {
    Value::Array(v.iter().map(|z| json!([z.re, z.im])).collect())
}

fn field<'a>(obj: &'a Map<String, Value>, key: &str) -> Result<&'a Value> {
    obj.get(key)
        .ok_or_else(|| err(format!("missing field `{key}`")))
}

fn object<'a>(v: &'a Value, what: &str) -> Result<&'a Map<String, Value>> {
    v.as_object()
        .ok_or_else(|| err(format!("{what} must be a JSON object, found {v}")))
}

fn only_keys(obj: &Map<String, Value>, allowed: &[&str], what: &str) -> Result<()> {
    match obj.keys().find(|k| !allowed.contains(&k.as_str())) {
        Some(k) => Err(err(format!("unknown field `{k}` in {what}"))),
        None => Ok(()),
    }
}

/// `[2, 1]` or `{"blocks": [2, 1]}`.
pub fn algebra(v: &Value) -> Result<FiniteCStarAlgebra> {
    let dims = match v {
        Value::Object(o) => {
            only_keys(o, &["blocks"], "algebra")?;
            field(o, "blocks")?
        }
        other => other,
    };
    let dims = naturals(dims)?.into_iter().map(|d| d as usize).collect();
    FiniteCStarAlgebra::new(dims)
}

/// `"unit"`, `{"blocks": [m, ..]}`, `{"flat": [..]}`, or
/// `{"function": [..]}` on a commutative algebra.
pub fn element(alg: &FiniteCStarAlgebra, v: &Value) -> Result<AlgebraElement> {
    match v {
        Value::String(s) if s == "unit" => Ok(alg.unit()),
        Value::Object(o) if o.len() == 1 => {
            let (k, body) = o.iter().next().unwrap();
            match k.as_str() {
                "blocks" => alg.element(
                    array(body, "blocks")?
                        .iter()
                        .map(matrix)
                        .collect::<Result<_>>()?,
                ),
                "flat" => alg.unflatten(&vector(body)?),
                "function" if alg.is_commutative() => alg.unflatten(&vector(body)?),
                "function" => Err(Error::PayloadInvalid(
                    "`function` elements need a commutative algebra".into(),
                )),
                other => Err(err(format!("unknown element form `{other}`"))),
            }
        }
        other => Err(err(format!("cannot read an algebra element from {other}"))),
    }
}

/// `"tracial"`, `{"densities": [..]}`, `{"point": k}`, `{"probability": [..]}`
/// or `{"vector": ξ}`.
pub fn state(alg: &FiniteCStarAlgebra, v: &Value) -> Result<State> {
    match v {
        Value::String(s) if s == "tracial" => Ok(State::tracial(alg)),
        Value::Object(o) if o.len() == 1 => {
            let (k, body) = o.iter().next().unwrap();
            match k.as_str() {
                "densities" => State::new(
                    alg,
                    array(body, "densities")?
                        .iter()
                        .map(matrix)
                        .collect::<Result<_>>()?,
                ),
                "point" => {
                    let k = body.as_u64().ok_or_else(|| err("`point` takes an index"))?;
                    State::point_mass(alg, k as usize)
                }
                "probability" => State::probability(alg, &reals(body)?),
                "vector" => State::vector_state(alg, &vector(body)?),
                other => Err(err(format!("unknown state form `{other}`"))),
            }
        }
        other => Err(err(format!("cannot read a state from {other}"))),
    }
}

/// `"identity"`, `{"matrix": M}`, `{"conjugation": V}`,
/// `{"blockwise_conjugation": [V, ..]}`, `{"stochastic": P}` or
/// `{"cyclic_shift": m}`.
pub fn map(alg: &FiniteCStarAlgebra, v: &Value) -> Result<AlgebraMap> {
    let built = match v {
        Value::String(s) if s == "identity" => AlgebraMap::identity(alg),
        Value::Object(o) if o.len() == 1 => {
            let (k, body) = o.iter().next().unwrap();
            match k.as_str() {
                "matrix" => AlgebraMap::from_matrix(alg, matrix(body)?)?,
                "conjugation" => AlgebraMap::blockwise_conjugation(alg, &[matrix(body)?])?,
                "blockwise_conjugation" => AlgebraMap::blockwise_conjugation(
                    alg,
                    &array(body, "conjugations")?
                        .iter()
                        .map(matrix)
                        .collect::<Result<Vec<_>>>()?,
                )?,
                "stochastic" => AlgebraMap::stochastic(&matrix(body)?)?,
                "cyclic_shift" => {
                    let m = body
                        .as_u64()
                        .ok_or_else(|| err("`cyclic_shift` takes a size"))?
                        as usize;
                    if m == 0 {
                        return Err(Error::PayloadInvalid(
                            "cyclic shift needs at least one point".into(),
                        ));
                    }
                    AlgebraMap::cyclic_shift(m)
                }
                other => return Err(err(format!("unknown map form `{other}`"))),
            }
        }
        other => return Err(err(format!("cannot read a map from {other}"))),
    };
    if built.algebra != *alg {
        return Err(Error::PayloadInvalid(format!(
            "map acts on blocks {:?}, algebra has {:?}",
            built.algebra.block_dims(),
            alg.block_dims()
        )));
    }
    Ok(built)
}

fn states_of<T>(obj: &Map<String, Value>, read: impl Fn(&Value) -> Result<T>) -> Result<Vec<T>> {
    match (obj.get("state"), obj.get("states")) {
        (Some(s), None) => Ok(vec![read(s)?]),
        (None, Some(list)) => array(list, "states")?.iter().map(read).collect(),
        (Some(_), Some(_)) => Err(err("give either `state` or `states`, not both")),
        (None, None) => Err(err("missing field `state`")),
    }
}

/// `{"s": S, "t": T, "xi": ξ}`.
pub fn operator_payload(v: &Value) -> Result<OperatorPayload> {
    let o = object(v, "operator payload")?;
    only_keys(o, &["s", "t", "xi"], "operator payload")?;
    Ok(OperatorPayload {
        s: matrix(field(o, "s")?)?,
        t: matrix(field(o, "t")?)?,
        xi: vector(field(o, "xi")?)?,
    })
}

/// `{"algebra", "map", "x", "state" | "states", "schedule"}`.
pub fn cstar_payload(v: &Value) -> Result<CStarPayload> {
    let o = object(v, "cstar payload")?;
    only_keys(
        o,
        &["algebra", "map", "x", "state", "states", "schedule"],
        "cstar payload",
    )?;
    let alg = algebra(field(o, "algebra")?)?;
    Ok(CStarPayload {
        map: map(&alg, field(o, "map")?)?,
        x: element(&alg, field(o, "x")?)?,
        states: states_of(o, |s| state(&alg, s))?,
        schedule: naturals(field(o, "schedule")?)?,
    })
}

/// `{"base_size", "fiber_dim", "s", "t", "x", "state" | "states", "schedule"}`;
/// `"lifted": P` replaces `s`/`t` with `S = P`, `T = P ⊗ I`, and
/// `"cyclic_shift": true` uses the shift pair.
pub fn module_payload(v: &Value) -> Result<ModulePayload> {
    let o = object(v, "module payload")?;
    only_keys(
        o,
        &[
            "base_size",
            "fiber_dim",
            "s",
            "t",
            "lifted",
            "cyclic_shift",
            "x",
            "state",
            "states",
            "schedule",
        ],
        "module payload",
    )?;
    let size = |k: &str| -> Result<usize> {
        field(o, k)?
            .as_u64()
            .map(|n| n as usize)
            .ok_or_else(|| err(format!("`{k}` must be a positive integer")))
    };
    let module = PreHilbertModule::new(size("base_size")?, size("fiber_dim")?)?;
    let pair = if o.get("cyclic_shift").and_then(Value::as_bool) == Some(true) {
        DominatedPair::cyclic_shift(module)
    } else if let Some(p) = o.get("lifted") {
        DominatedPair::lifted(module, matrix(p)?)?
    } else {
        DominatedPair::new(module, matrix(field(o, "s")?)?, matrix(field(o, "t")?)?)?
    };
    let x = module.element(matrix(field(o, "x")?)?)?;
    Ok(ModulePayload {
        pair,
        x,
        states: states_of(o, reals)?,
        schedule: naturals(field(o, "schedule")?)?,
    })
}

fn boxes(
    o: &Map<String, Value>,
    sides_key: &str,
    cubes_key: &str,
    dim: usize,
) -> Result<Vec<Vec<u64>>> {
    match (o.get(sides_key), o.get(cubes_key)) {
        (Some(s), None) => array(s, sides_key)?.iter().map(naturals).collect(),
        (None, Some(c)) => Ok(naturals(c)?.into_iter().map(|l| vec![l; dim]).collect()),
        _ => Err(err(format!(
            "give exactly one of `{sides_key}` and `{cubes_key}`"
        ))),
    }
}

/// `{"dim", "theta", "c", "f_sides" | "f_cubes", "g_sides" | "g_cubes", "offset"?}`
/// for the character field `u_t = e^{2πi⟨θ,t⟩} c` on `ℕ^dim`.
pub fn semigroup_payload(v: &Value) -> Result<SemigroupPayload> {
    let o = object(v, "semigroup payload")?;
    only_keys(
        o,
        &[
            "dim", "theta", "c", "f_sides", "f_cubes", "g_sides", "g_cubes", "offset",
        ],
        "semigroup payload",
    )?;
    let dim = field(o, "dim")?
        .as_u64()
        .filter(|&d| d > 0)
        .ok_or_else(|| err("`dim` must be a positive integer"))? as usize;
    let theta = reals(field(o, "theta")?)?;
    if theta.len() != dim {
        return Err(Error::PayloadInvalid(format!("theta needs {dim} entries")));
    }
    let c = vector(field(o, "c")?)?;
    let offset = match o.get("offset") {
        Some(r) => naturals(r)?,
        None => vec![0; dim],
    };
    Ok(SemigroupPayload {
        field: LatticeField::character(theta, c),
        f_sides: boxes(o, "f_sides", "f_cubes", dim)?,
        g_sides: boxes(o, "g_sides", "g_cubes", dim)?,
        offset,
    })
}

/// `{gram, basis, quotient, h, tol_used}` with matrices as `[re, im]` rows.
pub fn gns_value(space: &GnsSpace) -> Value {
    json!({
        "gram": matrix_value(&space.gram),
        "basis": matrix_value(&space.basis),
        "quotient": matrix_value(&space.quotient),
        "h": space.h,
        "tol_used": space.tol_used,
        "spectrum": space.spectrum,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;

    fn v(text: &str) -> Value {
        parse_json(text).unwrap()
    }

    #[test]
    fn complex_forms() {
        assert_eq!(complex(&v("2")).unwrap(), c(2.0, 0.0));
        assert_eq!(complex(&v("[1, -3]")).unwrap(), c(1.0, -3.0));
        assert_eq!(complex(&v("\"1-2i\"")).unwrap(), c(1.0, -2.0));
        assert!(complex(&v("[1, 2, 3]")).is_err());
    }

    #[test]
    fn matrices_round_trip() {
        let m = matrix(&v("[[1, [0, 1]], [\"2i\", -1]]")).unwrap();
        assert_eq!(m[(0, 1)], c(0.0, 1.0));
        assert_eq!(m[(1, 0)], c(0.0, 2.0));
        assert_eq!(matrix(&matrix_value(&m)).unwrap(), m);
        assert!(matrix(&v("[[1, 2], [3]]")).is_err());
    }

    #[test]
    fn algebra_objects() {
        let alg = algebra(&v("{\"blocks\": [2, 1]}")).unwrap();
        assert_eq!(alg.dim(), 5);
        assert_eq!(algebra(&v("[1,1,1]")).unwrap().dim(), 3);
        assert!(element(&alg, &v("\"unit\"")).unwrap() == alg.unit());
        let tr = state(&alg, &v("\"tracial\"")).unwrap();
        assert!((tr.eval(&alg.unit()).unwrap() - c(1.0, 0.0)).norm() < 1e-15);
        assert!(state(&alg, &v("{\"densities\": [[[1,0],[0,0]], [[0.5]]]}")).is_err());
        let shift = map(
            &algebra(&v("[1,1,1]")).unwrap(),
            &v("{\"cyclic_shift\": 3}"),
        )
        .unwrap();
        assert_eq!(shift.matrix[(0, 1)], c(1.0, 0.0));
        assert!(map(&alg, &v("{\"cyclic_shift\": 3}")).is_err());
    }

    #[test]
    fn payloads() {
        let p = cstar_payload(&v(r#"{
            "algebra": [1,1,1], "map": {"cyclic_shift": 3},
            "x": {"function": [1, 0, [0, 1]]}, "state": {"point": 0}, "schedule": [3, 6, 9]
        }"#))
        .unwrap();
        assert_eq!(p.schedule, vec![3, 6, 9]);
        assert!(
            cstar_payload(&v(r#"{"algebra": [1], "map": "identity", "x": "unit",
            "state": "tracial", "schedule": [1], "extra": 1}"#))
            .is_err()
        );

        let m = module_payload(&v(r#"{
            "base_size": 2, "fiber_dim": 1, "cyclic_shift": true,
            "x": [[1], [2]], "state": [0.5, 0.5], "schedule": [2, 4]
        }"#))
        .unwrap();
        assert_eq!(m.pair.module.ambient_dim(), 2);

        let s = semigroup_payload(&v(r#"{"dim": 2, "theta": [0.3, 0.7], "c": [1],
            "f_cubes": [10, 20], "g_cubes": [1, 2]}"#))
        .unwrap();
        assert_eq!(s.f_sides[1], vec![20, 20]);
        assert_eq!(s.offset, vec![0, 0]);
    }
}
