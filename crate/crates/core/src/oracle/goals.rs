//! Goal texts as executable predicates over ground-truth events.
//!
//! The grammar covers one phrase per event kind ("open the fridge",
//! "put the knife in the dishwasher", "go to the kitchen", ...), the generic
//! "cut the X" / "cook the X" forms, the recipe instruction, and sequences
//! joined by ", then ".

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::text::canonical_goal;
use crate::world::{CookState, CutState, EventKind, GroundEvent, ObjectId, RoomId, World};

/// Recipe instruction found in the cookbook; completed by eating the meal.
pub const RECIPE_GOAL: &str = "You are hungry! Let's cook a delicious meal. Check the cookbook in the kitchen for the recipe. Once done, enjoy your meal!";

/// Separator of sequential goals ("open the fridge, then pick up the parsley").
pub const THEN: &str = ", then ";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EventPattern {
    PickedUp(ObjectId),
    Put { object: ObjectId, target: ObjectId },
    Opened(ObjectId),
    Closed(ObjectId),
    Cut { object: ObjectId, style: Option<CutState> },
    Cooked { object: ObjectId, style: Option<CookState> },
    Moved(RoomId),
    Ate(ObjectId),
    ReadCookbook,
    PreparedMeal,
}

impl EventPattern {
    pub fn matches(&self, event: &EventKind) -> bool {
        match (*self, *event) {
            (EventPattern::PickedUp(a), EventKind::PickedUp { object }) => a == object,
            (EventPattern::Put { object: a, target: t }, EventKind::Put { object, target }) => {
                a == object && t == target
            }
            (EventPattern::Opened(a), EventKind::Opened { object }) => a == object,
            (EventPattern::Closed(a), EventKind::Closed { object }) => a == object,
            (EventPattern::Cut { object: a, style: s }, EventKind::Cut { object, style }) => {
                a == object && s.is_none_or(|s| s == style)
            }
            (EventPattern::Cooked { object: a, style: s }, EventKind::Cooked { object, style }) => {
                a == object && s.is_none_or(|s| s == style)
            }
            (EventPattern::Moved(a), EventKind::Moved { room }) => a == room,
            (EventPattern::Ate(a), EventKind::Ate { object }) => a == object,
            (EventPattern::ReadCookbook, EventKind::ReadCookbook { .. }) => true,
            (EventPattern::PreparedMeal, EventKind::PreparedMeal { .. }) => true,
            _ => false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GoalPredicate {
    Event(EventPattern),
    /// Each part must complete strictly after the previous one.
    Sequence(Vec<GoalPredicate>),
}

impl GoalPredicate {
    /// Parses a goal text. Returns `None` for goals outside the grammar.
    pub fn resolve(world: &World, text: &str) -> Option<GoalPredicate> {
        let canonical = canonical_goal(text);
        if canonical == canonical_goal(RECIPE_GOAL) {
            return Some(GoalPredicate::Event(EventPattern::Ate(world.recipe_product())));
        }
        if canonical.contains(THEN) {
            let parts: Option<Vec<GoalPredicate>> =
                canonical.split(THEN).map(|part| GoalPredicate::resolve(world, part)).collect();
            return parts.map(GoalPredicate::Sequence);
        }
        resolve_simple(world, &canonical.to_lowercase()).map(GoalPredicate::Event)
    }

    /// Step at which the goal is first complete, considering only events at
    /// or after `from`.
    pub fn first_step(&self, events: &[GroundEvent], from: u32) -> Option<u32> {
        match self {
            GoalPredicate::Event(pattern) => {
                events.iter().find(|e| e.step >= from && pattern.matches(&e.kind)).map(|e| e.step)
            }
            GoalPredicate::Sequence(parts) => {
                let mut at = from;
                let mut done = None;
                for part in parts {
                    let step = part.first_step(events, at)?;
                    done = Some(step);
                    at = step + 1;
                }
                done
            }
        }
    }

    pub fn completion_step(&self, events: &[GroundEvent]) -> Option<u32> {
        self.first_step(events, 0)
    }
}

fn object_after<'a>(world: &World, text: &'a str, prefix: &str) -> Option<ObjectId> {
    let rest: &'a str = text.strip_prefix(prefix)?;
    world.object_id(rest.strip_prefix("the ").unwrap_or(rest))
}

fn resolve_simple(world: &World, text: &str) -> Option<EventPattern> {
    if let Some(id) = object_after(world, text, "pick up ") {
        return Some(EventPattern::PickedUp(id));
    }
    if let Some(id) = object_after(world, text, "take ") {
        return Some(EventPattern::PickedUp(id));
    }
    if let Some(rest) = text.strip_prefix("put the ") {
        for sep in [" on the ", " in the "] {
            if let Some((object, target)) = rest.split_once(sep) {
                return Some(EventPattern::Put {
                    object: world.object_id(object)?,
                    target: world.object_id(target)?,
                });
            }
        }
        return None;
    }
    if let Some(id) = object_after(world, text, "open ") {
        return Some(EventPattern::Opened(id));
    }
    if let Some(id) = object_after(world, text, "close ") {
        return Some(EventPattern::Closed(id));
    }
    if let Some(id) = object_after(world, text, "eat ") {
        return Some(EventPattern::Ate(id));
    }
    if let Some(rest) = text.strip_prefix("go to ") {
        let room = rest.strip_prefix("the ").unwrap_or(rest);
        return world.room_id(room).map(EventPattern::Moved);
    }
    if let Some(id) = object_after(world, text, "cut ") {
        return Some(EventPattern::Cut { object: id, style: None });
    }
    if let Some(id) = object_after(world, text, "cook ") {
        return Some(EventPattern::Cooked { object: id, style: None });
    }
    for (verb, style) in world.cut_verbs() {
        if let Some(id) = object_after(world, text, &format!("{verb} ")) {
            return Some(EventPattern::Cut { object: id, style: Some(style) });
        }
    }
    for (verb, style) in world.cook_verbs() {
        if let Some(id) = object_after(world, text, &format!("{verb} ")) {
            return Some(EventPattern::Cooked { object: id, style: Some(style) });
        }
    }
    if object_after(world, text, "read ").is_some() {
        return Some(EventPattern::ReadCookbook);
    }
    if let Some(id) = object_after(world, text, "prepare ") {
        if id == world.recipe_product() {
            return Some(EventPattern::PreparedMeal);
        }
    }
    None
}

/// Plain description of an event, phrased so that
/// [`GoalPredicate::resolve`] maps it back to a pattern matching the event.
pub fn describe_event(world: &World, event: &EventKind) -> String {
    let name = |id: ObjectId| world.object_name(id);
    match *event {
        EventKind::PickedUp { object } => format!("pick up the {}", name(object)),
        EventKind::Put { object, target } => {
            let prep = if world.spec().objects[target.0 as usize].supporter { "on" } else { "in" };
            format!("put the {} {prep} the {}", name(object), name(target))
        }
        EventKind::Opened { object } => format!("open the {}", name(object)),
        EventKind::Closed { object } => format!("close the {}", name(object)),
        EventKind::Cut { object, style } => {
            format!("{} the {}", world.cut_verb(style).unwrap_or("cut"), name(object))
        }
        EventKind::Cooked { object, style } => {
            format!("{} the {}", world.cook_verb(style).unwrap_or("cook"), name(object))
        }
        EventKind::Moved { room } => format!("go to the {}", world.room_name(room)),
        EventKind::Ate { object } => format!("eat the {}", name(object)),
        EventKind::ReadCookbook { object } => format!("read the {}", name(object)),
        EventKind::PreparedMeal { object } => format!("prepare the {}", name(object)),
    }
}
