//! JSON form of a persistence diagram with labeled representatives and
//! short-cycle localizations.

use serde::{Deserialize, Serialize};

use crate::homology::{
    localize_short_cycles, max_lifespan_classes, ConcurrenceFiltration, LifespanConvention,
    PersistenceDiagram, PersistentClass,
};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShortCycleJson {
    pub vertices: (String, String, String),
    pub level_range: (u32, u32),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassJson {
    pub birth: u32,
    pub death: u32,
    pub lifespan: u32,
    pub representative_edges: Vec<(String, String)>,
    /// Localizations are computed for maximum-lifespan classes; empty
    /// otherwise.
    pub short_cycles: Vec<ShortCycleJson>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiagramJson {
    pub dimension: u8,
    pub lifespan_convention: LifespanConvention,
    pub classes: Vec<ClassJson>,
}

/// Serializable diagram with gene labels; short cycles are localized for
/// every maximum-lifespan class.
pub fn diagram_json(
    f: &ConcurrenceFiltration,
    diag: &PersistenceDiagram,
    convention: LifespanConvention,
) -> DiagramJson {
    let maximal = max_lifespan_classes(diag, convention);
    let label = |i: usize| f.col_labels[i].clone();
    let classes = diag
        .classes
        .iter()
        .map(|cls| {
            let short_cycles = if maximal.contains(cls) {
                localize_short_cycles(f, cls)
                    .into_iter()
                    .map(|sc| ShortCycleJson {
                        vertices: (label(sc.vertices.0), label(sc.vertices.1), label(sc.vertices.2)),
                        level_range: sc.valid_levels,
                    })
                    .collect()
            } else {
                Vec::new()
            };
            ClassJson {
                birth: cls.birth,
                death: cls.death,
                lifespan: cls.lifespan(convention),
                representative_edges: cls
                    .representative
                    .iter()
                    .map(|&(i, j)| (label(i), label(j)))
                    .collect(),
                short_cycles,
            }
        })
        .collect();
    DiagramJson { dimension: 1, lifespan_convention: convention, classes }
}

impl DiagramJson {
    /// Bare (birth, death) diagram, enough for plotting.
    pub fn to_diagram(&self) -> PersistenceDiagram {
        PersistenceDiagram {
            classes: self
                .classes
                .iter()
                .map(|c| PersistentClass {
                    birth: c.birth,
                    death: c.death,
                    representative: Vec::new(),
                })
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homology::{build_filtration, persistent_homology};
    use crate::matrix::BinaryMatrix;

    #[test]
    fn round_trips_through_json() {
        let b = BinaryMatrix::new(
            vec![1, 1, 0, 0, 1, 1, 1, 0, 1],
            vec!["r0".into(), "r1".into(), "r2".into()],
            vec!["A".into(), "B".into(), "C".into()],
        )
        .unwrap();
        let f = build_filtration(&b);
        let diag = persistent_homology(&f);
        let json = diagram_json(&f, &diag, LifespanConvention::Difference);
        assert_eq!(json.classes.len(), 1);
        assert_eq!(json.classes[0].lifespan, 1);
        assert_eq!(json.classes[0].short_cycles.len(), 1);
        assert_eq!(
            json.classes[0].short_cycles[0].vertices,
            ("A".into(), "B".into(), "C".into())
        );

        let text = serde_json::to_string(&json).unwrap();
        let back: DiagramJson = serde_json::from_str(&text).unwrap();
        assert_eq!(back, json);
        assert_eq!(back.to_diagram().multiplicities(), diag.multiplicities());
    }
}
