//! Declarative description of a world: rooms, objects, initial placements and
//! the verb tables that bind cutting and cooking verbs to states and tools.
//!
//! A [`ScenarioSpec`] uses names everywhere so it can be written by hand in a
//! config file. [`World::new`](super::World::new) resolves the names into ids.

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::state::{CookState, CutState, Direction, ObjectKind};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub name: String,
    pub horizon: u32,
    pub start_room: String,
    pub rooms: Vec<RoomSpec>,
    pub objects: Vec<ObjectSpec>,
    pub cutting_tool: String,
    pub cut_verbs: Vec<CutVerb>,
    pub cook_verbs: Vec<CookVerb>,
    pub recipe: RecipeSpec,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoomSpec {
    pub name: String,
    #[serde(default)]
    pub exits: Vec<ExitSpec>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExitSpec {
    pub direction: Direction,
    pub to: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObjectSpec {
    pub name: String,
    pub kind: ObjectKind,
    /// Indefinite article override ("some" for mass nouns).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub article: Option<String>,
    #[serde(default)]
    pub portable: bool,
    /// Openable container.
    #[serde(default)]
    pub container: bool,
    #[serde(default)]
    pub supporter: bool,
    #[serde(default)]
    pub edible: bool,
    pub placement: Placement,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Placement {
    Room(String),
    On(String),
    In(String),
    /// Created later by an action (the meal).
    Unspawned,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CutVerb {
    pub verb: String,
    pub state: CutState,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CookVerb {
    pub verb: String,
    pub state: CookState,
    pub appliance: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecipeSpec {
    pub product: String,
    pub room: String,
    pub cookbook: String,
    pub ingredients: Vec<RecipeIngredient>,
    pub directions: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecipeIngredient {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cut: Option<CutState>,
}

fn object(name: &str, kind: ObjectKind, placement: Placement) -> ObjectSpec {
    ObjectSpec {
        name: name.to_string(),
        kind,
        article: None,
        portable: false,
        container: false,
        supporter: false,
        edible: false,
        placement,
    }
}

fn in_room(room: &str) -> Placement {
    Placement::Room(room.to_string())
}

fn ingredient(name: &str, placement: Placement) -> ObjectSpec {
    ObjectSpec { portable: true, edible: true, ..object(name, ObjectKind::Ingredient, placement) }
}

impl ScenarioSpec {
    /// The fixed kitchen scenario: a corridor with the kitchen to the south,
    /// seven pieces of furniture, four tools, seven ingredients and a cookbook.
    pub fn cooking_world() -> Self {
        let kitchen = "kitchen";
        let container = |name: &str| ObjectSpec {
            container: true,
            ..object(name, ObjectKind::Furniture, in_room(kitchen))
        };
        let supporter = |name: &str| ObjectSpec {
            supporter: true,
            ..object(name, ObjectKind::Furniture, in_room(kitchen))
        };
        let some = |spec: ObjectSpec| ObjectSpec { article: Some("some".to_string()), ..spec };
        let on = |s: &str| Placement::On(s.to_string());
        let inside = |s: &str| Placement::In(s.to_string());

        ScenarioSpec {
            name: "cooking_world".to_string(),
            horizon: 25,
            start_room: "corridor".to_string(),
            rooms: vec![
                RoomSpec {
                    name: "corridor".to_string(),
                    exits: vec![ExitSpec { direction: Direction::South, to: kitchen.to_string() }],
                },
                RoomSpec {
                    name: kitchen.to_string(),
                    exits: vec![ExitSpec { direction: Direction::North, to: "corridor".to_string() }],
                },
            ],
            objects: vec![
                object("stove", ObjectKind::Tool, in_room(kitchen)),
                object("oven", ObjectKind::Tool, in_room(kitchen)),
                object("toaster", ObjectKind::Tool, in_room(kitchen)),
                container("fridge"),
                supporter("counter"),
                supporter("dining chair"),
                container("kitchen cupboard"),
                container("cutlery drawer"),
                container("trash can"),
                container("dishwasher"),
                ObjectSpec {
                    portable: true,
                    ..object("knife", ObjectKind::Tool, inside("kitchen cupboard"))
                },
                ObjectSpec { portable: true, ..object("cookbook", ObjectKind::Cookbook, on("counter")) },
                ingredient("red potato", on("counter")),
                ingredient("yellow potato", on("counter")),
                ingredient("red apple", on("dining chair")),
                ingredient("yellow apple", on("dining chair")),
                ingredient("green apple", inside("trash can")),
                some(ingredient("parsley", inside("fridge"))),
                some(ingredient("cilantro", inside("fridge"))),
                ObjectSpec {
                    portable: true,
                    edible: true,
                    ..object("meal", ObjectKind::Meal, Placement::Unspawned)
                },
            ],
            cutting_tool: "knife".to_string(),
            cut_verbs: vec![
                CutVerb { verb: "slice".to_string(), state: CutState::Sliced },
                CutVerb { verb: "dice".to_string(), state: CutState::Diced },
                CutVerb { verb: "chop".to_string(), state: CutState::Chopped },
            ],
            cook_verbs: vec![
                CookVerb { verb: "fry".to_string(), state: CookState::Fried, appliance: "stove".to_string() },
                CookVerb {
                    verb: "roast".to_string(),
                    state: CookState::Roasted,
                    appliance: "oven".to_string(),
                },
                CookVerb {
                    verb: "grill".to_string(),
                    state: CookState::Grilled,
                    appliance: "toaster".to_string(),
                },
            ],
            recipe: RecipeSpec {
                product: "meal".to_string(),
                room: kitchen.to_string(),
                cookbook: "cookbook".to_string(),
                ingredients: vec![
                    RecipeIngredient { name: "parsley".to_string(), cut: Some(CutState::Sliced) },
                    RecipeIngredient { name: "cilantro".to_string(), cut: None },
                ],
                directions: vec!["slice the parsley".to_string(), "prepare meal".to_string()],
            },
        }
    }
}
