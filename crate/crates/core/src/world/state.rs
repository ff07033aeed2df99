use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

/// Index of an object in the scenario's object table.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ObjectId(pub u8);

/// Index of a room in the scenario's room table.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RoomId(pub u8);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObjectKind {
    Furniture,
    Tool,
    Ingredient,
    Cookbook,
    Meal,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CutState {
    Uncut,
    Sliced,
    Diced,
    Chopped,
}

impl CutState {
    pub fn participle(self) -> Option<&'static str> {
        match self {
            CutState::Uncut => None,
            CutState::Sliced => Some("sliced"),
            CutState::Diced => Some("diced"),
            CutState::Chopped => Some("chopped"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CookState {
    Raw,
    Fried,
    Roasted,
    Grilled,
}

impl CookState {
    pub fn participle(self) -> Option<&'static str> {
        match self {
            CookState::Raw => None,
            CookState::Fried => Some("fried"),
            CookState::Roasted => Some("roasted"),
            CookState::Grilled => Some("grilled"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    North,
    South,
    East,
    West,
}

impl Direction {
    pub fn word(self) -> &'static str {
        match self {
            Direction::North => "north",
            Direction::South => "south",
            Direction::East => "east",
            Direction::West => "west",
        }
    }

    pub fn title(self) -> &'static str {
        match self {
            Direction::North => "North",
            Direction::South => "South",
            Direction::East => "East",
            Direction::West => "West",
        }
    }
}

/// Where an object is. Exactly one per object at any time.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Location {
    Room(RoomId),
    On(ObjectId),
    In(ObjectId),
    Inventory,
    Consumed,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ObjectState {
    pub kind: ObjectKind,
    pub location: Location,
    pub openable: bool,
    pub open: bool,
    pub cut_state: CutState,
    pub cook_state: CookState,
}

impl ObjectState {
    pub fn consumed(&self) -> bool {
        self.location == Location::Consumed
    }
}

/// Complete snapshot of the world. Cheap enough to clone on every step.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WorldState {
    pub current_room: RoomId,
    pub step: u32,
    pub objects: BTreeMap<ObjectId, ObjectState>,
    pub inventory: Vec<ObjectId>,
    pub cookbook_read: bool,
}

/// A broken structural invariant, reported by [`WorldState::check_invariants`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum InvariantViolation {
    InventoryMismatch(ObjectId),
    CutNonIngredient(ObjectId),
    HeldByNonContainer(ObjectId),
    OpenNonOpenable(ObjectId),
    StepPastHorizon(u32),
}

impl fmt::Display for InvariantViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InvariantViolation::InventoryMismatch(id) => {
                write!(f, "object {} inventory flag and list disagree", id.0)
            }
            InvariantViolation::CutNonIngredient(id) => {
                write!(f, "object {} is cut but is not an ingredient", id.0)
            }
            InvariantViolation::HeldByNonContainer(id) => {
                write!(f, "object {} is inside something that is not a container", id.0)
            }
            InvariantViolation::OpenNonOpenable(id) => {
                write!(f, "object {} is open but cannot be opened", id.0)
            }
            InvariantViolation::StepPastHorizon(step) => write!(f, "step {step} past horizon"),
        }
    }
}

impl WorldState {
    pub fn object(&self, id: ObjectId) -> Option<&ObjectState> {
        self.objects.get(&id)
    }

    pub fn holds(&self, id: ObjectId) -> bool {
        self.objects.get(&id).is_some_and(|o| o.location == Location::Inventory)
    }

    pub fn check_invariants(&self, horizon: u32) -> Result<(), InvariantViolation> {
        if self.step > horizon {
            return Err(InvariantViolation::StepPastHorizon(self.step));
        }
        for (&id, obj) in &self.objects {
            let listed = self.inventory.iter().filter(|&&i| i == id).count();
            let held = obj.location == Location::Inventory;
            if listed > 1 || held != (listed == 1) {
                return Err(InvariantViolation::InventoryMismatch(id));
            }
            if obj.cut_state != CutState::Uncut && obj.kind != ObjectKind::Ingredient {
                return Err(InvariantViolation::CutNonIngredient(id));
            }
            if obj.open && !obj.openable {
                return Err(InvariantViolation::OpenNonOpenable(id));
            }
            if let Location::In(holder) = obj.location {
                if !self.objects.get(&holder).is_some_and(|h| h.openable) {
                    return Err(InvariantViolation::HeldByNonContainer(id));
                }
            }
        }
        for id in &self.inventory {
            if !self.objects.contains_key(id) {
                return Err(InvariantViolation::InventoryMismatch(*id));
            }
        }
        Ok(())
    }
}
