//! The closed set of mention platforms.
//!
//! Exactly 21 sources, in a fixed canonical order that every feature matrix,
//! CSV column layout, and serialized model in the toolkit shares.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Number of platforms; the width of every feature matrix.
pub const N_PLATFORMS: usize = 21;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[repr(u8)]
pub enum PlatformId {
    Mendeley,
    Citeulike,
    Connotea,
    Twitter,
    Patent,
    Facebook,
    Blogs,
    Wikipedia,
    Stackoverflow,
    Syllabi,
    Policy,
    News,
    Googleplus,
    F1000,
    Reddit,
    Video,
    Pinterest,
    PeerReview,
    Weibo,
    Linkedin,
    Misc,
}

/// All platforms in canonical order.
pub const ALL_PLATFORMS: [PlatformId; N_PLATFORMS] = [
    PlatformId::Mendeley,
    PlatformId::Citeulike,
    PlatformId::Connotea,
    PlatformId::Twitter,
    PlatformId::Patent,
    PlatformId::Facebook,
    PlatformId::Blogs,
    PlatformId::Wikipedia,
    PlatformId::Stackoverflow,
    PlatformId::Syllabi,
    PlatformId::Policy,
    PlatformId::News,
    PlatformId::Googleplus,
    PlatformId::F1000,
    PlatformId::Reddit,
    PlatformId::Video,
    PlatformId::Pinterest,
    PlatformId::PeerReview,
    PlatformId::Weibo,
    PlatformId::Linkedin,
    PlatformId::Misc,
];

impl PlatformId {
    /// Position in the canonical order; the feature-matrix column.
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(idx: usize) -> Option<Self> {
        ALL_PLATFORMS.get(idx).copied()
    }

    pub fn as_str(self) -> &'static str {
        match self {
            PlatformId::Mendeley => "mendeley",
            PlatformId::Citeulike => "citeulike",
            PlatformId::Connotea => "connotea",
            PlatformId::Twitter => "twitter",
            PlatformId::Patent => "patent",
            PlatformId::Facebook => "facebook",
            PlatformId::Blogs => "blogs",
            PlatformId::Wikipedia => "wikipedia",
            PlatformId::Stackoverflow => "stackoverflow",
            PlatformId::Syllabi => "syllabi",
            PlatformId::Policy => "policy",
            PlatformId::News => "news",
            PlatformId::Googleplus => "googleplus",
            PlatformId::F1000 => "f1000",
            PlatformId::Reddit => "reddit",
            PlatformId::Video => "video",
            PlatformId::Pinterest => "pinterest",
            PlatformId::PeerReview => "peer_review",
            PlatformId::Weibo => "weibo",
            PlatformId::Linkedin => "linkedin",
            PlatformId::Misc => "misc",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        ALL_PLATFORMS
            .iter()
            .copied()
            .find(|p| p.as_str() == s)
            .ok_or_else(|| Error::Validation(format!("unknown platform {s:?}")))
    }

    /// Canonical platform names, for feature-name lists and CSV headers.
    pub fn names() -> Vec<String> {
        ALL_PLATFORMS.iter().map(|p| p.as_str().to_string()).collect()
    }
}

impl fmt::Display for PlatformId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Serialize for PlatformId {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for PlatformId {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        PlatformId::parse(&s).map_err(serde::de::Error::custom)
    }
}
