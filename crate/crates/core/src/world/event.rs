use serde::{Deserialize, Serialize};

use super::state::{CookState, CutState, ObjectId, RoomId};

/// Ground-truth record of something that changed in the world.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GroundEvent {
    pub step: u32,
    pub kind: EventKind,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EventKind {
    PickedUp { object: ObjectId },
    Put { object: ObjectId, target: ObjectId },
    Opened { object: ObjectId },
    Closed { object: ObjectId },
    Cut { object: ObjectId, style: CutState },
    Cooked { object: ObjectId, style: CookState },
    Moved { room: RoomId },
    Ate { object: ObjectId },
    ReadCookbook { object: ObjectId },
    PreparedMeal { object: ObjectId },
}

impl EventKind {
    pub fn label(&self) -> &'static str {
        match self {
            EventKind::PickedUp { .. } => "picked_up",
            EventKind::Put { .. } => "put",
            EventKind::Opened { .. } => "opened",
            EventKind::Closed { .. } => "closed",
            EventKind::Cut { .. } => "cut",
            EventKind::Cooked { .. } => "cooked",
            EventKind::Moved { .. } => "moved",
            EventKind::Ate { .. } => "ate",
            EventKind::ReadCookbook { .. } => "read_cookbook",
            EventKind::PreparedMeal { .. } => "prepared_meal",
        }
    }
}
