use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::state::{CookState, CutState, Direction, ObjectId};
use super::World;

/// Structured form of a catalogue action.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "verb", rename_all = "snake_case")]
pub enum Command {
    Move { direction: Direction },
    Open { object: ObjectId },
    Close { object: ObjectId },
    Take { object: ObjectId },
    Put { object: ObjectId, target: ObjectId },
    Cut { object: ObjectId, style: CutState },
    Cook { object: ObjectId, style: CookState },
    Eat { object: ObjectId },
    Read { object: ObjectId },
    Prepare { object: ObjectId },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CatalogueEntry {
    pub text: String,
    pub command: Command,
}

pub(crate) fn build_catalogue(world: &World) -> Vec<CatalogueEntry> {
    let mut out = Vec::new();
    let mut push = |text: String, command: Command| out.push(CatalogueEntry { text, command });

    let mut directions: Vec<Direction> =
        world.rooms.iter().flat_map(|r| r.exits.iter().map(|(d, _)| *d)).collect();
    directions.sort();
    directions.dedup();
    for direction in directions {
        push(format!("move {}", direction.word()), Command::Move { direction });
    }

    let ids = || (0..world.objects.len()).map(|i| ObjectId(i as u8));
    for id in ids() {
        let info = world.info(id);
        let name = &info.name;
        if info.container {
            push(format!("open the {name}"), Command::Open { object: id });
            push(format!("close the {name}"), Command::Close { object: id });
        }
        if info.portable {
            push(format!("pick up the {name}"), Command::Take { object: id });
            for target in ids() {
                let t = world.info(target);
                if t.supporter {
                    push(format!("put the {name} on the {}", t.name), Command::Put { object: id, target });
                } else if t.container {
                    push(format!("put the {name} in the {}", t.name), Command::Put { object: id, target });
                }
            }
        }
        if info.kind == super::ObjectKind::Ingredient {
            for (verb, style) in &world.cut_verbs {
                push(format!("{verb} the {name}"), Command::Cut { object: id, style: *style });
            }
            for (verb, style, _) in &world.cook_verbs {
                push(format!("{verb} the {name}"), Command::Cook { object: id, style: *style });
            }
        }
        if info.edible {
            push(format!("eat the {name}"), Command::Eat { object: id });
        }
    }
    push(
        format!("read the {}", world.info(world.recipe.cookbook).name),
        Command::Read { object: world.recipe.cookbook },
    );
    push(
        format!("prepare the {}", world.info(world.recipe.product).name),
        Command::Prepare { object: world.recipe.product },
    );

    out.sort_by(|a, b| a.text.cmp(&b.text));
    out
}
