pub mod combinatorics;
pub mod error;
pub mod linalg;
pub mod par;
pub mod sqmod;
pub mod invariants;
pub mod oracle;
