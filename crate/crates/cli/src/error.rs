use harmonic_gbc::geometry::GeometryError;
use harmonic_gbc::mapping::MapError;
use harmonic_gbc::solver::SolverError;
use harmonic_gbc::warp::WarpError;
use harmonic_gbc::GbcError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Usage,
    Io,
    Parse,
    Validation,
    NonInjective,
    Solver,
    Meshing,
}

impl Kind {
    pub fn code(self) -> &'static str {
        match self {
            Kind::Usage => "usage",
            Kind::Io => "io",
            Kind::Parse => "parse",
            Kind::Validation => "validation",
            Kind::NonInjective => "non_injective",
            Kind::Solver => "solver",
            Kind::Meshing => "meshing",
        }
    }

    pub fn exit_code(self) -> i32 {
        match self {
            Kind::Usage | Kind::Io | Kind::Parse | Kind::Validation => 2,
            Kind::NonInjective => 3,
            Kind::Solver | Kind::Meshing => 4,
        }
    }
}

#[derive(Debug, Clone, thiserror::Error)]
#[error("{detail}")]
pub struct CliError {
    pub kind: Kind,
    pub detail: String,
}

impl CliError {
    pub fn new(kind: Kind, detail: impl Into<String>) -> Self {
        CliError {
            kind,
            detail: detail.into(),
        }
    }

    pub fn to_json(&self) -> String {
        // Built by hand so `error` comes first; serde_json would sort the keys.
        format!(
            "{{\"error\":{},\"detail\":{}}}",
            serde_json::Value::from(self.kind.code()),
            serde_json::Value::from(self.detail.as_str())
        )
    }
}

impl From<GeometryError> for CliError {
    fn from(e: GeometryError) -> Self {
        let kind = match e {
            GeometryError::MeshingFailure(_) => Kind::Meshing,
            GeometryError::Parse(_) => Kind::Parse,
            _ => Kind::Validation,
        };
        CliError::new(kind, e.to_string())
    }
}

impl From<SolverError> for CliError {
    fn from(e: SolverError) -> Self {
        CliError::new(Kind::Solver, e.to_string())
    }
}

impl From<GbcError> for CliError {
    fn from(e: GbcError) -> Self {
        match e {
            GbcError::Geometry(g) => g.into(),
            GbcError::Solver(s) => s.into(),
            GbcError::Negative { .. } => CliError::new(Kind::Solver, e.to_string()),
            _ => CliError::new(Kind::Validation, e.to_string()),
        }
    }
}

impl From<MapError> for CliError {
    fn from(e: MapError) -> Self {
        let kind = match e {
            MapError::Ambiguous { .. } => Kind::NonInjective,
            _ => Kind::Validation,
        };
        CliError::new(kind, e.to_string())
    }
}

impl From<WarpError> for CliError {
    fn from(e: WarpError) -> Self {
        match e {
            WarpError::Gbc(g) => g.into(),
            WarpError::Map(m) => m.into(),
            WarpError::NonInjective { .. } => CliError::new(Kind::NonInjective, e.to_string()),
            WarpError::InvalidImage(_) => CliError::new(Kind::Validation, e.to_string()),
        }
    }
}
