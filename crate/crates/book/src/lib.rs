//! The guide's chapters, compiled as doc-tests so every listing in
//! `book/src` builds and runs against the current library.

macro_rules! chapter {
    ($name:ident, $file:literal) => {
        #[doc = include_str!(concat!("../../../book/src/", $file))]
        pub mod $name {}
    };
}

chapter!(introduction, "introduction.md");
chapter!(proximal_operators, "proximal-operators.md");
chapter!(haar, "haar.md");
chapter!(algorithm, "algorithm.md");
chapter!(diagnostics, "diagnostics.md");
chapter!(baselines, "baselines.md");
chapter!(experiments, "experiments.md");
chapter!(cli, "cli.md");
