use thiserror::Error;

#[derive(Error, Debug)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid mesh: {0}")]
    InvalidMesh(String),
    #[error("geometry error in cell {cell}: {reason}")]
    Geometry { cell: usize, reason: String },
    #[error("unsupported polynomial degree {0} (need k >= 2)")]
    UnsupportedDegree(usize),
    #[error("mesh file line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("voronoi generation failed: {0}")]
    Voronoi(String),
    #[error("singular matrix: {0}")]
    Singular(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("internal numerical error: {0}")]
    Internal(String),
    #[error("solver failure on {context}: {source}")]
    Solve {
        context: String,
        #[source]
        source: Box<Error>,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
