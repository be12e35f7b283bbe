//! Five-way direction commands derived from planned yaw.

use crate::error::{invalid, Result};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DirectionCommand {
    Forward,
    LeftForward,
    RightForward,
    TurnLeft,
    TurnRight,
    /// Issued when no lattice path is feasible.
    Stop,
}

impl DirectionCommand {
    pub const ALL: [DirectionCommand; 6] = [
        DirectionCommand::Forward,
        DirectionCommand::LeftForward,
        DirectionCommand::RightForward,
        DirectionCommand::TurnLeft,
        DirectionCommand::TurnRight,
        DirectionCommand::Stop,
    ];

    pub fn token(self) -> &'static str {
        match self {
            DirectionCommand::Forward => "forward",
            DirectionCommand::LeftForward => "left-forward",
            DirectionCommand::RightForward => "right-forward",
            DirectionCommand::TurnLeft => "turn-left",
            DirectionCommand::TurnRight => "turn-right",
            DirectionCommand::Stop => "stop",
        }
    }

    /// Left/right swapped.
    pub fn mirrored(self) -> Self {
        match self {
            DirectionCommand::LeftForward => DirectionCommand::RightForward,
            DirectionCommand::RightForward => DirectionCommand::LeftForward,
            DirectionCommand::TurnLeft => DirectionCommand::TurnRight,
            DirectionCommand::TurnRight => DirectionCommand::TurnLeft,
            other => other,
        }
    }
}

impl fmt::Display for DirectionCommand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for DirectionCommand {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|c| c.token() == s)
            .ok_or_else(|| invalid(format!("unknown direction token {s:?}")))
    }
}

/// Angular sector boundaries, symmetric about straight ahead.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SectorConfig {
    pub forward_half_angle: f64,
    pub slight_turn_limit: f64,
}

impl Default for SectorConfig {
    fn default() -> Self {
        Self {
            forward_half_angle: 5f64.to_radians(),
            slight_turn_limit: 20f64.to_radians(),
        }
    }
}

impl SectorConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = 0.0 < self.forward_half_angle
            && self.forward_half_angle < self.slight_turn_limit
            && self.slight_turn_limit < std::f64::consts::FRAC_PI_2;
        if ok {
            Ok(())
        } else {
            Err(invalid(
                "need 0 < forward_half_angle < slight_turn_limit < π/2",
            ))
        }
    }
}

/// Maps a yaw (positive = left) to a command. Sector edges belong to the
/// gentler command.
pub fn command_from_yaw(yaw: f64, sectors: &SectorConfig) -> DirectionCommand {
    let mag = yaw.abs();
    let left = yaw > 0.0;
    if mag <= sectors.forward_half_angle {
        DirectionCommand::Forward
    } else if mag <= sectors.slight_turn_limit {
        if left {
            DirectionCommand::LeftForward
        } else {
            DirectionCommand::RightForward
        }
    } else if left {
        DirectionCommand::TurnLeft
    } else {
        DirectionCommand::TurnRight
    }
}

/// Text token standing in for the spoken instruction.
pub fn emit(command: DirectionCommand) -> &'static str {
    command.token()
}

#[cfg(test)]
mod tests {
    use super::*;
    use DirectionCommand::*;

    #[test]
    #[allow(clippy::approx_constant)] // literal example values
    fn sector_examples() {
        let s = SectorConfig::default();
        assert_eq!(command_from_yaw(0.0, &s), Forward);
        assert_eq!(command_from_yaw(0.1745, &s), LeftForward);
        assert_eq!(command_from_yaw(-0.5236, &s), TurnRight);
        assert_eq!(command_from_yaw(-0.1745, &s), RightForward);
        assert_eq!(command_from_yaw(2.5, &s), TurnLeft);
    }

    #[test]
    fn edges_go_to_gentler_command() {
        let s = SectorConfig::default();
        assert_eq!(command_from_yaw(s.forward_half_angle, &s), Forward);
        assert_eq!(command_from_yaw(-s.forward_half_angle, &s), Forward);
        assert_eq!(command_from_yaw(s.slight_turn_limit, &s), LeftForward);
        assert_eq!(command_from_yaw(-s.slight_turn_limit, &s), RightForward);
    }

    #[test]
    fn tokens() {
        assert_eq!(emit(Forward), "forward");
        assert_eq!(emit(TurnLeft), "turn-left");
        assert_eq!(emit(Stop), "stop");
        for c in DirectionCommand::ALL {
            assert_eq!(c.token().parse::<DirectionCommand>().unwrap(), c);
            assert_eq!(serde_json::to_string(&c).unwrap(), format!("\"{}\"", c.token()));
        }
        assert!("left".parse::<DirectionCommand>().is_err());
    }

    #[test]
    fn sector_validation() {
        assert!(SectorConfig::default().validate().is_ok());
        let bad = SectorConfig {
            forward_half_angle: 0.4,
            slight_turn_limit: 0.3,
        };
        assert!(bad.validate().is_err());
    }
}
