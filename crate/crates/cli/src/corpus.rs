//! Built-in example manifests, compiled into the binary.

pub struct Example {
    pub name: &'static str,
    pub description: &'static str,
    pub text: &'static str,
}

pub const EXAMPLES: [Example; 8] = [
    Example {
        name: "a1-two-lifts",
        description: "two liftings on the affine line, rank 2, p = 5 (the worked scenario)",
        text: include_str!("../corpus/a1-two-lifts.json"),
    },
    Example {
        name: "a1-three-lifts",
        description: "three liftings on the affine line; all triple-overlap cocycles",
        text: include_str!("../corpus/a1-three-lifts.json"),
    },
    Example {
        name: "gm-lifts",
        description: "inverted coordinate with Laurent denominators in lifts and field",
        text: include_str!("../corpus/gm-lifts.json"),
    },
    Example {
        name: "a2-rank2",
        description: "affine plane at p = 3; both flatness mechanisms nontrivial",
        text: include_str!("../corpus/a2-rank2.json"),
    },
    Example {
        name: "a2-rank3-taylor",
        description: "rank 3, exponent 2 on the plane; weight-2 multi-index expansion",
        text: include_str!("../corpus/a2-rank3-taylor.json"),
    },
    Example {
        name: "fq-base",
        description: "base field F_9; inverse Frobenius in the divided differences",
        text: include_str!("../corpus/fq-base.json"),
    },
    Example {
        name: "nontrivial-transitions",
        description: "non-identity transition matrices from a unipotent gauge",
        text: include_str!("../corpus/nontrivial-transitions.json"),
    },
    Example {
        name: "a1-single",
        description: "single patch; trivially verified atlas",
        text: include_str!("../corpus/a1-single.json"),
    },
];

pub fn find(name: &str) -> Option<&'static Example> {
    EXAMPLES.iter().find(|e| e.name == name)
}

pub fn available_names() -> Vec<&'static str> {
    EXAMPLES.iter().map(|e| e.name).collect()
}
