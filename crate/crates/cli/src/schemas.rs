//! Versioned report schemas shipped in-repo and embedded in the binary.

const SCHEMAS: &[(&str, &str)] = &[
    ("defect", include_str!("../schemas/v1/defect.schema.json")),
    ("sigma", include_str!("../schemas/v1/sigma.schema.json")),
    ("dpi", include_str!("../schemas/v1/dpi.schema.json")),
    ("protocol-audit", include_str!("../schemas/v1/protocol-audit.schema.json")),
    ("strobe", include_str!("../schemas/v1/strobe.schema.json")),
    ("affinity", include_str!("../schemas/v1/affinity.schema.json")),
    ("gate", include_str!("../schemas/v1/gate.schema.json")),
    ("gap", include_str!("../schemas/v1/gap.schema.json")),
    ("forcing", include_str!("../schemas/v1/forcing.schema.json")),
    ("icap", include_str!("../schemas/v1/icap.schema.json")),
    ("zeno", include_str!("../schemas/v1/zeno.schema.json")),
    ("route", include_str!("../schemas/v1/route.schema.json")),
];

pub fn schema_for(command: &str) -> Option<&'static str> {
    SCHEMAS.iter().find(|(name, _)| *name == command).map(|(_, text)| *text)
}
