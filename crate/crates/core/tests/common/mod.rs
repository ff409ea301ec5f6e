#![allow(dead_code)]

use mfree::measures::{Measure, MeasureR, MeasureT};

pub fn two_atom() -> Measure {
    Measure::R(MeasureR::atomic(&[(1.0, 0.5), (4.0, 0.5)]).unwrap())
}

pub fn three_atom() -> Measure {
    Measure::R(MeasureR::atomic(&[(1.0, 1.0 / 3.0), (2.0, 1.0 / 3.0), (3.0, 1.0 / 3.0)]).unwrap())
}

pub fn four_atom() -> Measure {
    Measure::R(MeasureR::atomic(&[(0.1, 0.25), (0.2, 0.25), (5.0, 0.25), (10.0, 0.25)]).unwrap())
}

pub fn dominant_atom_r() -> Measure {
    Measure::R(MeasureR::atomic(&[(1.0, 0.8), (4.0, 0.2)]).unwrap())
}

/// 0.4 delta_{1.5} + 0.6 Uniform[1, 2].
pub fn mixture() -> Measure {
    Measure::R(MeasureR::with_uniform(&[(1.5, 0.4)], 0.6, 1.0, 2.0).unwrap())
}

/// 0.3 delta_0 + 0.7 delta_2.
pub fn with_zero() -> Measure {
    Measure::R(MeasureR::new(vec![mfree::measures::Atom { pos: 2.0, mass: 0.7 }], 0.3, None).unwrap())
}

pub fn haar(s: f64) -> Measure {
    Measure::T(MeasureT::haar_mixture(s).unwrap())
}

/// 0.8 delta_1 + 0.2 Haar.
pub fn dominant_atom_t() -> Measure {
    haar(0.2)
}

/// Two separated atoms at +-0.5 rad on a Poisson background.
pub fn two_atoms_background() -> Measure {
    Measure::T(MeasureT::with_poisson(&[(0.5, 0.4), (-0.5, 0.4)], 0.2, 0.7, 2048).unwrap())
}

pub fn rotated_point() -> Measure {
    Measure::T(MeasureT::point(0.7).unwrap())
}

/// Both corpora.
pub fn corpus() -> Vec<(&'static str, Measure)> {
    corpus_r().into_iter().chain(corpus_t()).collect()
}

/// JSON text of a measure in the input format.
pub fn to_json(mu: &Measure) -> String {
    serde_json::to_string(&mu.to_spec()).unwrap()
}

/// Half-line corpus, named.
pub fn corpus_r() -> Vec<(&'static str, Measure)> {
    vec![
        ("point 0.5", Measure::R(MeasureR::point(0.5).unwrap())),
        ("point 2", Measure::R(MeasureR::point(2.0).unwrap())),
        ("two atoms", two_atom()),
        ("three atoms", three_atom()),
        ("four atoms", four_atom()),
        ("dominant atom", dominant_atom_r()),
        ("atom plus uniform", mixture()),
        ("mass at zero", with_zero()),
    ]
}

pub fn corpus_t() -> Vec<(&'static str, Measure)> {
    vec![
        ("rotated point", rotated_point()),
        ("haar 0.3", haar(0.3)),
        ("haar 0.5", haar(0.5)),
        ("haar 0.7", haar(0.7)),
        ("dominant atom", dominant_atom_t()),
    ]
}
