use std::fmt;

use super::IonError;
use super::multilevel::Level;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Quadrature {
    X,
    Z,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PulseKind {
    CollectiveX,
    SingleZ,
    MolmerSorensen,
    /// Carrier/sideband transition `{|g>|0>_v, |e>|1>_v}` of the target ion.
    DetunedCz(Quadrature),
    /// `{|l>|1>_v, |l'>|0>_v}` of the target ion.
    DetunedHide(Level, Quadrature),
    /// `{|l>, |l'>}` of the target ion.
    DetunedSwitch(Level, Quadrature),
}

/// Pulse families that the noise mask can select.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NoiseClass {
    CollectiveX,
    SingleZ,
    MolmerSorensen,
    Detuned,
}

impl NoiseClass {
    pub const ALL: [NoiseClass; 4] =
        [NoiseClass::CollectiveX, NoiseClass::SingleZ, NoiseClass::MolmerSorensen, NoiseClass::Detuned];

    pub fn token(self) -> &'static str {
        match self {
            NoiseClass::CollectiveX => "collectiveX",
            NoiseClass::SingleZ => "singleZ",
            NoiseClass::MolmerSorensen => "moelmerSoerensen",
            NoiseClass::Detuned => "detuned",
        }
    }

    pub fn parse(token: &str) -> Option<Self> {
        NoiseClass::ALL.into_iter().find(|c| c.token() == token)
    }
}

impl PulseKind {
    pub fn noise_class(self) -> NoiseClass {
        match self {
            PulseKind::CollectiveX => NoiseClass::CollectiveX,
            PulseKind::SingleZ => NoiseClass::SingleZ,
            PulseKind::MolmerSorensen => NoiseClass::MolmerSorensen,
            _ => NoiseClass::Detuned,
        }
    }

    fn is_collective(self) -> bool {
        matches!(self, PulseKind::CollectiveX | PulseKind::MolmerSorensen)
    }

    pub fn token(self) -> String {
        let q = |q: Quadrature| match q {
            Quadrature::X => "x",
            Quadrature::Z => "z",
        };
        let l = |l: Level| match l {
            Level::G => "g",
            Level::E => "e",
        };
        match self {
            PulseKind::CollectiveX => "collectiveX".into(),
            PulseKind::SingleZ => "singleZ".into(),
            PulseKind::MolmerSorensen => "moelmerSoerensen".into(),
            PulseKind::DetunedCz(qu) => format!("detunedCZ.{}", q(qu)),
            PulseKind::DetunedHide(lv, qu) => format!("detunedHide.{}.{}", l(lv), q(qu)),
            PulseKind::DetunedSwitch(lv, qu) => format!("detunedSwitch.{}.{}", l(lv), q(qu)),
        }
    }

    pub fn parse(token: &str) -> Option<Self> {
        let quad = |s: &str| match s {
            "x" => Some(Quadrature::X),
            "z" => Some(Quadrature::Z),
            _ => None,
        };
        let level = |s: &str| match s {
            "g" => Some(Level::G),
            "e" => Some(Level::E),
            _ => None,
        };
        let parts: Vec<&str> = token.split('.').collect();
        match parts.as_slice() {
            ["collectiveX"] => Some(PulseKind::CollectiveX),
            ["singleZ"] => Some(PulseKind::SingleZ),
            ["moelmerSoerensen"] => Some(PulseKind::MolmerSorensen),
            ["detunedCZ", q] => Some(PulseKind::DetunedCz(quad(q)?)),
            ["detunedHide", l, q] => Some(PulseKind::DetunedHide(level(l)?, quad(q)?)),
            ["detunedSwitch", l, q] => Some(PulseKind::DetunedSwitch(level(l)?, quad(q)?)),
            _ => None,
        }
    }
}

impl fmt::Display for PulseKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.token())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Target {
    All,
    /// 1-based ion index.
    Ion(usize),
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Target::All => f.write_str("all"),
            Target::Ion(i) => write!(f, "{i}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pulse {
    kind: PulseKind,
    target: Target,
    angle: f64,
}

impl Pulse {
    pub fn new(kind: PulseKind, target: Target, angle: f64) -> Result<Self, IonError> {
        if !angle.is_finite() {
            return Err(IonError::InvalidPulse(format!("angle {angle}")));
        }
        match (kind.is_collective(), target) {
            (true, Target::All) => {}
            (false, Target::Ion(i)) if i >= 1 => {}
            _ => return Err(IonError::InvalidPulse(format!("{kind} cannot target {target}"))),
        }
        Ok(Pulse { kind, target, angle })
    }

    pub fn collective_x(angle: f64) -> Self {
        Pulse { kind: PulseKind::CollectiveX, target: Target::All, angle }
    }

    pub fn single_z(ion: usize, angle: f64) -> Self {
        Pulse { kind: PulseKind::SingleZ, target: Target::Ion(ion), angle }
    }

    pub fn molmer_sorensen(angle: f64) -> Self {
        Pulse { kind: PulseKind::MolmerSorensen, target: Target::All, angle }
    }

    pub fn detuned(kind: PulseKind, ion: usize, angle: f64) -> Self {
        Pulse { kind, target: Target::Ion(ion), angle }
    }

    pub fn kind(&self) -> PulseKind {
        self.kind
    }

    pub fn target(&self) -> Target {
        self.target
    }

    pub fn angle(&self) -> f64 {
        self.angle
    }

    pub fn with_angle(&self, angle: f64) -> Self {
        Pulse { angle, ..*self }
    }

    /// `<kind> <target> <angle>` with 17 significant digits.
    pub fn to_line(&self) -> String {
        format!("{} {} {:.16e}", self.kind, self.target, self.angle)
    }

    pub fn parse_line(line: &str) -> Result<Self, String> {
        let fields: Vec<&str> = line.split_whitespace().collect();
        let [kind, target, angle] = fields.as_slice() else {
            return Err(format!("expected 3 fields, found {}", fields.len()));
        };
        let kind = PulseKind::parse(kind).ok_or_else(|| format!("unknown pulse kind '{kind}'"))?;
        let target = match *target {
            "all" => Target::All,
            t => Target::Ion(t.parse().map_err(|_| format!("invalid target '{t}'"))?),
        };
        let angle: f64 = angle.parse().map_err(|_| format!("invalid angle '{angle}'"))?;
        Pulse::new(kind, target, angle).map_err(|e| e.to_string())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PulseSequence {
    pulses: Vec<Pulse>,
    qubits: usize,
}

impl PulseSequence {
    pub fn new(qubits: usize, pulses: Vec<Pulse>) -> Result<Self, IonError> {
        for p in &pulses {
            if let Target::Ion(i) = p.target() {
                if i > qubits {
                    return Err(IonError::InvalidPulse(format!("ion {i} outside {qubits} ions")));
                }
            }
        }
        Ok(PulseSequence { pulses, qubits })
    }

    pub fn empty(qubits: usize) -> Self {
        PulseSequence { pulses: Vec::new(), qubits }
    }

    pub fn pulses(&self) -> &[Pulse] {
        &self.pulses
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn len(&self) -> usize {
        self.pulses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pulses.is_empty()
    }

    pub fn push(&mut self, pulse: Pulse) {
        self.pulses.push(pulse);
    }

    pub fn extend(&mut self, other: &PulseSequence) {
        self.pulses.extend_from_slice(&other.pulses);
    }

    pub fn map_angles(&self, mut f: impl FnMut(&Pulse) -> f64) -> Self {
        PulseSequence { pulses: self.pulses.iter().map(|p| p.with_angle(f(p))).collect(), qubits: self.qubits }
    }

    pub fn to_text(&self) -> String {
        self.pulses.iter().map(|p| p.to_line() + "\n").collect()
    }

    /// Strict inverse of [`PulseSequence::to_text`]; every line must be a pulse.
    pub fn parse(text: &str, qubits: usize) -> Result<Self, IonError> {
        let pulses = text
            .lines()
            .enumerate()
            .map(|(i, line)| Pulse::parse_line(line).map_err(|message| IonError::Parse { line: i + 1, message }))
            .collect::<Result<Vec<_>, _>>()?;
        PulseSequence::new(qubits, pulses)
    }
}
