//! Deterministic text kitchen: text commands in, text observations out, plus a
//! ground-truth event log for the oracle components.
//!
//! [`World`] is the immutable compiled scenario. All dynamics are pure
//! functions of a [`WorldState`] value, so states can be copied, replayed and
//! compared freely.

mod command;
mod engine;
mod render;
mod scenario;
mod state;

pub mod event;

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

pub use command::{CatalogueEntry, Command};
pub use engine::StepOutcome;
pub use event::{EventKind, GroundEvent};
pub use scenario::{
    CookVerb, CutVerb, ExitSpec, ObjectSpec, Placement, RecipeIngredient, RecipeSpec, RoomSpec, ScenarioSpec,
};
pub use state::{
    CookState, CutState, Direction, InvariantViolation, Location, ObjectId, ObjectKind, ObjectState, RoomId,
    WorldState,
};

/// Observation returned for catalogue actions that are not possible right now.
pub const CANNOT_DO: &str = "You can't do that.";
/// Observation returned for text that is not in the action catalogue.
pub const NOT_UNDERSTOOD: &str = "I don't understand that command.";

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum WorldError {
    #[error("episode exhausted: {0} steps already taken")]
    EpisodeExhausted(u32),
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ScenarioError {
    #[error("unknown room `{0}`")]
    UnknownRoom(String),
    #[error("unknown object `{0}`")]
    UnknownObject(String),
    #[error("duplicate name `{0}`")]
    Duplicate(String),
    #[error("`{0}` cannot hold objects")]
    NotAHolder(String),
    #[error("scenario must declare at most 255 objects and rooms")]
    TooLarge,
    #[error("horizon must be at least one step")]
    ZeroHorizon,
}

#[derive(Clone, Debug)]
pub(crate) struct RoomInfo {
    pub name: String,
    pub exits: Vec<(Direction, RoomId)>,
}

#[derive(Clone, Debug)]
pub(crate) struct ObjectInfo {
    pub name: String,
    pub kind: ObjectKind,
    pub article: Option<String>,
    pub portable: bool,
    pub container: bool,
    pub supporter: bool,
    pub edible: bool,
}

#[derive(Clone, Debug)]
pub(crate) struct Recipe {
    pub product: ObjectId,
    pub room: RoomId,
    pub cookbook: ObjectId,
    pub ingredients: Vec<(ObjectId, Option<CutState>)>,
    pub directions: Vec<String>,
}

/// A compiled scenario together with its action catalogue.
#[derive(Clone, Debug)]
pub struct World {
    spec: ScenarioSpec,
    rooms: Vec<RoomInfo>,
    objects: Vec<ObjectInfo>,
    cutting_tool: ObjectId,
    cut_verbs: Vec<(String, CutState)>,
    cook_verbs: Vec<(String, CookState, ObjectId)>,
    recipe: Recipe,
    catalogue: Vec<CatalogueEntry>,
    by_text: BTreeMap<String, usize>,
    initial: WorldState,
}

impl Default for World {
    fn default() -> Self {
        World::cooking_world()
    }
}

impl World {
    /// The built-in kitchen scenario.
    pub fn cooking_world() -> Self {
        World::new(ScenarioSpec::cooking_world()).expect("built-in scenario is valid")
    }

    pub fn new(spec: ScenarioSpec) -> Result<Self, ScenarioError> {
        if spec.rooms.len() > 255 || spec.objects.len() > 255 {
            return Err(ScenarioError::TooLarge);
        }
        if spec.horizon == 0 {
            return Err(ScenarioError::ZeroHorizon);
        }
        let room_id = |name: &str| -> Result<RoomId, ScenarioError> {
            spec.rooms
                .iter()
                .position(|r| r.name == name)
                .map(|i| RoomId(i as u8))
                .ok_or_else(|| ScenarioError::UnknownRoom(name.into()))
        };
        let object_id = |name: &str| -> Result<ObjectId, ScenarioError> {
            spec.objects
                .iter()
                .position(|o| o.name == name)
                .map(|i| ObjectId(i as u8))
                .ok_or_else(|| ScenarioError::UnknownObject(name.into()))
        };

        for (i, room) in spec.rooms.iter().enumerate() {
            if spec.rooms[..i].iter().any(|r| r.name == room.name) {
                return Err(ScenarioError::Duplicate(room.name.clone()));
            }
        }
        for (i, obj) in spec.objects.iter().enumerate() {
            if spec.objects[..i].iter().any(|o| o.name == obj.name) {
                return Err(ScenarioError::Duplicate(obj.name.clone()));
            }
        }

        let mut rooms = Vec::with_capacity(spec.rooms.len());
        for room in &spec.rooms {
            let mut exits = Vec::new();
            for exit in &room.exits {
                exits.push((exit.direction, room_id(&exit.to)?));
            }
            rooms.push(RoomInfo { name: room.name.clone(), exits });
        }

        let objects: Vec<ObjectInfo> = spec
            .objects
            .iter()
            .map(|o| ObjectInfo {
                name: o.name.clone(),
                kind: o.kind,
                article: o.article.clone(),
                portable: o.portable,
                container: o.container,
                supporter: o.supporter,
                edible: o.edible,
            })
            .collect();

        let mut initial_objects = BTreeMap::new();
        for (i, o) in spec.objects.iter().enumerate() {
            let location = match &o.placement {
                Placement::Unspawned => continue,
                Placement::Room(r) => Location::Room(room_id(r)?),
                Placement::On(s) => {
                    let holder = object_id(s)?;
                    if !objects[holder.0 as usize].supporter {
                        return Err(ScenarioError::NotAHolder(s.clone()));
                    }
                    Location::On(holder)
                }
                Placement::In(c) => {
                    let holder = object_id(c)?;
                    if !objects[holder.0 as usize].container {
                        return Err(ScenarioError::NotAHolder(c.clone()));
                    }
                    Location::In(holder)
                }
            };
            initial_objects.insert(
                ObjectId(i as u8),
                ObjectState {
                    kind: o.kind,
                    location,
                    openable: o.container,
                    open: false,
                    cut_state: CutState::Uncut,
                    cook_state: CookState::Raw,
                },
            );
        }

        let cutting_tool = object_id(&spec.cutting_tool)?;
        let cut_verbs = spec.cut_verbs.iter().map(|v| (v.verb.clone(), v.state)).collect();
        let mut cook_verbs = Vec::new();
        for v in &spec.cook_verbs {
            cook_verbs.push((v.verb.clone(), v.state, object_id(&v.appliance)?));
        }
        let mut ingredients = Vec::new();
        for ing in &spec.recipe.ingredients {
            ingredients.push((object_id(&ing.name)?, ing.cut));
        }
        let recipe = Recipe {
            product: object_id(&spec.recipe.product)?,
            room: room_id(&spec.recipe.room)?,
            cookbook: object_id(&spec.recipe.cookbook)?,
            ingredients,
            directions: spec.recipe.directions.clone(),
        };

        let initial = WorldState {
            current_room: room_id(&spec.start_room)?,
            step: 0,
            objects: initial_objects,
            inventory: Vec::new(),
            cookbook_read: false,
        };

        let mut world = World {
            spec,
            rooms,
            objects,
            cutting_tool,
            cut_verbs,
            cook_verbs,
            recipe,
            catalogue: Vec::new(),
            by_text: BTreeMap::new(),
            initial,
        };
        world.catalogue = command::build_catalogue(&world);
        world.by_text = world.catalogue.iter().enumerate().map(|(i, e)| (e.text.clone(), i)).collect();
        Ok(world)
    }

    pub fn spec(&self) -> &ScenarioSpec {
        &self.spec
    }

    pub fn horizon(&self) -> u32 {
        self.spec.horizon
    }

    /// The fixed initial state.
    pub fn reset(&self) -> WorldState {
        self.initial.clone()
    }

    /// Full action catalogue, sorted lexicographically.
    pub fn action_catalogue(&self) -> &[CatalogueEntry] {
        &self.catalogue
    }

    pub fn parse_action(&self, text: &str) -> Option<Command> {
        self.by_text.get(text).map(|&i| self.catalogue[i].command)
    }

    pub fn object_name(&self, id: ObjectId) -> &str {
        &self.objects[id.0 as usize].name
    }

    pub fn room_name(&self, id: RoomId) -> &str {
        &self.rooms[id.0 as usize].name
    }

    pub fn object_id(&self, name: &str) -> Option<ObjectId> {
        self.objects.iter().position(|o| o.name == name).map(|i| ObjectId(i as u8))
    }

    pub fn room_id(&self, name: &str) -> Option<RoomId> {
        self.rooms.iter().position(|r| r.name == name).map(|i| RoomId(i as u8))
    }

    pub fn object_count(&self) -> usize {
        self.objects.len()
    }

    pub fn room_count(&self) -> usize {
        self.rooms.len()
    }

    pub fn object_kind(&self, id: ObjectId) -> ObjectKind {
        self.objects[id.0 as usize].kind
    }

    /// Verb used for a cut style in this scenario.
    pub fn cut_verb(&self, style: CutState) -> Option<&str> {
        self.cut_verbs.iter().find(|(_, s)| *s == style).map(|(v, _)| v.as_str())
    }

    pub fn cook_verb(&self, style: CookState) -> Option<&str> {
        self.cook_verbs.iter().find(|(_, s, _)| *s == style).map(|(v, _, _)| v.as_str())
    }

    pub fn cut_verbs(&self) -> impl Iterator<Item = (&str, CutState)> {
        self.cut_verbs.iter().map(|(v, s)| (v.as_str(), *s))
    }

    pub fn cook_verbs(&self) -> impl Iterator<Item = (&str, CookState)> {
        self.cook_verbs.iter().map(|(v, s, _)| (v.as_str(), *s))
    }

    pub fn recipe_product(&self) -> ObjectId {
        self.recipe.product
    }

    pub(crate) fn info(&self, id: ObjectId) -> &ObjectInfo {
        &self.objects[id.0 as usize]
    }

    pub(crate) fn room(&self, id: RoomId) -> &RoomInfo {
        &self.rooms[id.0 as usize]
    }
}
