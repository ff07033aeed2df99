use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::state::{Location, ObjectId, ObjectKind, RoomId, WorldState};
use super::World;
use crate::text::{indefinite_article, join_list};

const OPENERS: [&str; 4] = [
    "In one part of the room you see",
    "There is also",
    "You also see",
    "In another part of the room you see",
];

impl World {
    /// Full description of the agent's current room.
    pub fn render_room(&self, state: &WorldState) -> String {
        self.describe_room(state, state.current_room)
    }

    pub fn describe_room(&self, state: &WorldState, room: RoomId) -> String {
        let mut out = format!("You are in the {}.", self.room(room).name);
        let here: Vec<ObjectId> = state
            .objects
            .iter()
            .filter(|(_, o)| o.location == Location::Room(room))
            .map(|(&id, _)| id)
            .collect();
        for (i, id) in here.iter().enumerate() {
            out.push(' ');
            out.push_str(OPENERS[i % OPENERS.len()]);
            out.push(' ');
            out.push_str(&self.fixture_phrase(state, *id));
            out.push('.');
        }
        for (direction, to) in &self.room(room).exits {
            out.push_str(&format!(" To the {} you see the {}.", direction.title(), self.room(*to).name));
        }
        out
    }

    fn fixture_phrase(&self, state: &WorldState, id: ObjectId) -> String {
        let info = self.info(id);
        let obj = &state.objects[&id];
        if info.container {
            if !obj.open {
                return format!("{} that is closed", self.with_article(&info.name, None));
            }
            let items = self.contents_indefinite(state, id, Location::In(id));
            if items.is_empty() {
                format!("an open {}, that is empty", info.name)
            } else {
                format!("an open {}, that contains {}", info.name, join_list(&items))
            }
        } else if info.supporter {
            let items = self.contents_indefinite(state, id, Location::On(id));
            let listed = if items.is_empty() { String::from("nothing") } else { join_list(&items) };
            format!("{}, that has {} on it", self.with_article(&info.name, None), listed)
        } else {
            self.item_phrase(state, id)
        }
    }

    fn contents_indefinite(&self, state: &WorldState, _holder: ObjectId, at: Location) -> Vec<String> {
        state
            .objects
            .iter()
            .filter(|(_, o)| o.location == at)
            .map(|(&id, _)| self.item_phrase(state, id))
            .collect()
    }

    /// "the parsley and the cilantro", used when a container is opened.
    pub(crate) fn contents_definite(&self, state: &WorldState, holder: ObjectId) -> String {
        let items: Vec<String> = state
            .objects
            .iter()
            .filter(|(_, o)| o.location == Location::In(holder))
            .map(|(&id, _)| format!("the {}", self.info(id).name))
            .collect();
        join_list(&items)
    }

    /// Indefinite phrase with preparation adjectives, e.g. "a sliced fried red
    /// potato" or "some parsley".
    pub fn item_phrase(&self, state: &WorldState, id: ObjectId) -> String {
        let info = self.info(id);
        let mut words: Vec<&str> = Vec::new();
        if let Some(obj) = state.objects.get(&id) {
            if obj.kind == ObjectKind::Ingredient {
                words.extend(obj.cut_state.participle());
                words.extend(obj.cook_state.participle());
            }
        }
        words.push(&info.name);
        let noun = words.join(" ");
        self.with_article(&noun, info.article.as_deref())
    }

    fn with_article(&self, noun: &str, article: Option<&str>) -> String {
        let article = article.unwrap_or_else(|| indefinite_article(noun));
        format!("{article} {noun}")
    }
}
