//! The bundled transfer-line model: machines M1, M2, test unit TU, and the
//! buffer specifications B1 (capacity 3) and B2 (capacity 1).

use crate::automata::{meet, selfloop, sync, Alphabet, Generator};
use crate::error::Result;
use crate::format::parse_generator;
use crate::localization::AgentSpec;

/// Fixture files as `(file name, contents)`.
pub const TRANSFER_LINE_FILES: [(&str, &str); 5] = [
    ("M1.gen", include_str!("../fixtures/transfer_line/M1.gen")),
    ("M2.gen", include_str!("../fixtures/transfer_line/M2.gen")),
    ("TU.gen", include_str!("../fixtures/transfer_line/TU.gen")),
    ("B1.gen", include_str!("../fixtures/transfer_line/B1.gen")),
    ("B2.gen", include_str!("../fixtures/transfer_line/B2.gen")),
];

fn load(file: &str) -> Generator {
    let (_, text) = TRANSFER_LINE_FILES
        .iter()
        .find(|(name, _)| *name == file)
        .expect("bundled fixture");
    parse_generator(text).expect("bundled fixture parses")
}

/// The transfer-line plant and its buffer specification.
#[derive(Debug, Clone)]
pub struct TransferLine {
    pub components: Vec<Generator>,
    pub plant: Generator,
    pub buffers: Vec<Generator>,
    /// Buffer specifications self-looped to the plant alphabet and met.
    pub spec: Generator,
}

impl TransferLine {
    pub fn load() -> Result<Self> {
        let components = vec![load("M1.gen"), load("M2.gen"), load("TU.gen")];
        let refs: Vec<&Generator> = components.iter().collect();
        let plant = sync(&refs)?.with_name("TL");
        let buffers = vec![load("B1.gen"), load("B2.gen")];
        let mut lifted = Vec::new();
        for b in &buffers {
            let missing = plant.alphabet().without(b.alphabet().events());
            lifted.push(selfloop(b, &missing)?);
        }
        let spec = meet(&lifted[0], &lifted[1])?.with_name("BUF");
        Ok(TransferLine {
            components,
            plant,
            buffers,
            spec,
        })
    }

    /// One agent per component, owning that component's events.
    pub fn agents(&self) -> Vec<AgentSpec> {
        self.components
            .iter()
            .map(|c| {
                AgentSpec::new(
                    c.name(),
                    c.alphabet().events().clone(),
                    self.plant.alphabet(),
                )
            })
            .collect()
    }

    pub fn plant_alphabet(&self) -> &Alphabet {
        self.plant.alphabet()
    }
}
