use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::command::Command;
use super::event::{EventKind, GroundEvent};
use super::state::{CookState, CutState, Location, ObjectId, ObjectKind, ObjectState, WorldState};
use super::{World, WorldError, CANNOT_DO, NOT_UNDERSTOOD};

/// Result of one environment transition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepOutcome {
    pub state: WorldState,
    pub observation: String,
    pub events: Vec<GroundEvent>,
}

impl World {
    /// True when `id` can be seen from the agent's room without being held:
    /// placed in the room, on a supporter there, or inside an open container
    /// there.
    pub fn in_reach(&self, state: &WorldState, id: ObjectId) -> bool {
        let Some(obj) = state.objects.get(&id) else {
            return false;
        };
        match obj.location {
            Location::Room(r) => r == state.current_room,
            Location::On(holder) => self.in_reach(state, holder),
            Location::In(holder) => {
                state.objects.get(&holder).is_some_and(|h| h.open) && self.in_reach(state, holder)
            }
            Location::Inventory | Location::Consumed => false,
        }
    }

    fn is_possible(&self, state: &WorldState, command: Command) -> bool {
        let obj = |id: ObjectId| state.objects.get(&id);
        match command {
            Command::Move { direction } => {
                self.room(state.current_room).exits.iter().any(|(d, _)| *d == direction)
            }
            Command::Open { object } => {
                self.in_reach(state, object) && obj(object).is_some_and(|o| o.openable && !o.open)
            }
            Command::Close { object } => {
                self.in_reach(state, object) && obj(object).is_some_and(|o| o.openable && o.open)
            }
            Command::Take { object } => self.info(object).portable && self.in_reach(state, object),
            Command::Put { object, target } => {
                state.holds(object)
                    && self.in_reach(state, target)
                    && (self.info(target).supporter || obj(target).is_some_and(|t| t.openable && t.open))
            }
            Command::Cut { object, .. } => {
                state.holds(self.cutting_tool)
                    && state.holds(object)
                    && obj(object)
                        .is_some_and(|o| o.kind == ObjectKind::Ingredient && o.cut_state == CutState::Uncut)
            }
            Command::Cook { object, style } => {
                let appliance_here = self
                    .cook_verbs
                    .iter()
                    .find(|(_, s, _)| *s == style)
                    .is_some_and(|(_, _, appliance)| self.in_reach(state, *appliance));
                appliance_here
                    && state.holds(object)
                    && obj(object)
                        .is_some_and(|o| o.kind == ObjectKind::Ingredient && o.cook_state == CookState::Raw)
            }
            Command::Eat { object } => self.info(object).edible && state.holds(object),
            Command::Read { object } => state.holds(object) || self.in_reach(state, object),
            Command::Prepare { object } => {
                state.current_room == self.recipe.room
                    && state.cookbook_read
                    && !state.objects.contains_key(&object)
                    && self.recipe.ingredients.iter().all(|(ing, cut)| {
                        state.holds(*ing) && cut.is_none_or(|c| obj(*ing).is_some_and(|o| o.cut_state == c))
                    })
            }
        }
    }

    /// Context-valid subset of the catalogue, in lexicographic order.
    pub fn admissible_actions(&self, state: &WorldState) -> Vec<&str> {
        self.catalogue
            .iter()
            .filter(|e| self.is_possible(state, e.command))
            .map(|e| e.text.as_str())
            .collect()
    }

    /// Applies one action. Invalid or unknown actions still consume the step
    /// and leave everything else untouched.
    pub fn step(&self, state: &WorldState, action: &str) -> Result<StepOutcome, WorldError> {
        if state.step >= self.horizon() {
            return Err(WorldError::EpisodeExhausted(state.step));
        }
        let mut next = state.clone();
        next.step += 1;
        let Some(command) = self.parse_action(action) else {
            return Ok(StepOutcome { state: next, observation: NOT_UNDERSTOOD.into(), events: Vec::new() });
        };
        if !self.is_possible(state, command) {
            return Ok(StepOutcome { state: next, observation: CANNOT_DO.into(), events: Vec::new() });
        }
        let step = next.step;
        let (observation, kind) = self.apply(&mut next, command);
        Ok(StepOutcome { state: next, observation, events: alloc::vec![GroundEvent { step, kind }] })
    }

    fn apply(&self, state: &mut WorldState, command: Command) -> (String, EventKind) {
        let name = |id: ObjectId| self.info(id).name.as_str();
        match command {
            Command::Move { direction } => {
                let (_, to) = *self
                    .room(state.current_room)
                    .exits
                    .iter()
                    .find(|(d, _)| *d == direction)
                    .expect("checked");
                state.current_room = to;
                (self.render_room(state), EventKind::Moved { room: to })
            }
            Command::Open { object } => {
                set(state, object, |o| o.open = true);
                let contents = self.contents_definite(state, object);
                let obs = if contents.is_empty() {
                    format!("You open the {}. It is empty.", name(object))
                } else {
                    format!("You open the {}. It contains {}.", name(object), contents)
                };
                (obs, EventKind::Opened { object })
            }
            Command::Close { object } => {
                set(state, object, |o| o.open = false);
                (format!("You close the {}.", name(object)), EventKind::Closed { object })
            }
            Command::Take { object } => {
                set(state, object, |o| o.location = Location::Inventory);
                state.inventory.push(object);
                (format!("You pick up the {}.", name(object)), EventKind::PickedUp { object })
            }
            Command::Put { object, target } => {
                let (location, prep) = if self.info(target).supporter {
                    (Location::On(target), "on")
                } else {
                    (Location::In(target), "in")
                };
                set(state, object, |o| o.location = location);
                state.inventory.retain(|&i| i != object);
                (
                    format!("You put the {} {prep} the {}.", name(object), name(target)),
                    EventKind::Put { object, target },
                )
            }
            Command::Cut { object, style } => {
                set(state, object, |o| o.cut_state = style);
                let verb = self.cut_verb(style).unwrap_or("cut");
                (format!("You {verb} the {}.", name(object)), EventKind::Cut { object, style })
            }
            Command::Cook { object, style } => {
                set(state, object, |o| o.cook_state = style);
                let (verb, _, appliance) =
                    self.cook_verbs.iter().find(|(_, s, _)| *s == style).expect("checked");
                (
                    format!("You {verb} the {} with the {}.", name(object), name(*appliance)),
                    EventKind::Cooked { object, style },
                )
            }
            Command::Eat { object } => {
                set(state, object, |o| o.location = Location::Consumed);
                state.inventory.retain(|&i| i != object);
                (format!("You eat the {}. Not bad.", name(object)), EventKind::Ate { object })
            }
            Command::Read { object } => {
                state.cookbook_read = true;
                (self.recipe_text(object), EventKind::ReadCookbook { object })
            }
            Command::Prepare { object } => {
                for (ing, _) in &self.recipe.ingredients {
                    set(state, *ing, |o| o.location = Location::Consumed);
                    state.inventory.retain(|i| i != ing);
                }
                state.objects.insert(
                    object,
                    ObjectState {
                        kind: self.info(object).kind,
                        location: Location::Inventory,
                        openable: false,
                        open: false,
                        cut_state: CutState::Uncut,
                        cook_state: CookState::Raw,
                    },
                );
                state.inventory.push(object);
                (
                    format!("Adding the {} to your inventory.", name(object)),
                    EventKind::PreparedMeal { object },
                )
            }
        }
    }

    fn recipe_text(&self, cookbook: ObjectId) -> String {
        let ingredients: Vec<&str> =
            self.recipe.ingredients.iter().map(|(id, _)| self.info(*id).name.as_str()).collect();
        format!(
            "You open the {} and start reading: Recipe #1. Gather all following ingredients and follow the directions to prepare this tasty {}. Ingredients: {}. Directions: {}.",
            self.info(cookbook).name,
            self.info(self.recipe.product).name,
            ingredients.join(", "),
            self.recipe.directions.join(", "),
        )
    }
}

fn set(state: &mut WorldState, id: ObjectId, f: impl FnOnce(&mut ObjectState)) {
    if let Some(o) = state.objects.get_mut(&id) {
        f(o);
    }
}
