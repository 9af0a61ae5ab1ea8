//! Heuristic part-of-speech tagging: closed-class lexicon, then suffix
//! rules, then `NN`.

use std::fmt;

/// Penn Treebank tags this tagger can emit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PosTag {
    CC,
    CD,
    DT,
    EX,
    IN,
    JJ,
    MD,
    NN,
    NNS,
    PDT,
    PRP,
    PRPS,
    RB,
    TO,
    UH,
    VB,
    VBD,
    VBG,
    VBN,
    VBP,
    VBZ,
    WDT,
    WP,
    WPS,
    WRB,
}

impl PosTag {
    pub const ALL: [PosTag; 25] = [
        PosTag::CC,
        PosTag::CD,
        PosTag::DT,
        PosTag::EX,
        PosTag::IN,
        PosTag::JJ,
        PosTag::MD,
        PosTag::NN,
        PosTag::NNS,
        PosTag::PDT,
        PosTag::PRP,
        PosTag::PRPS,
        PosTag::RB,
        PosTag::TO,
        PosTag::UH,
        PosTag::VB,
        PosTag::VBD,
        PosTag::VBG,
        PosTag::VBN,
        PosTag::VBP,
        PosTag::VBZ,
        PosTag::WDT,
        PosTag::WP,
        PosTag::WPS,
        PosTag::WRB,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            PosTag::CC => "CC",
            PosTag::CD => "CD",
            PosTag::DT => "DT",
            PosTag::EX => "EX",
            PosTag::IN => "IN",
            PosTag::JJ => "JJ",
            PosTag::MD => "MD",
            PosTag::NN => "NN",
            PosTag::NNS => "NNS",
            PosTag::PDT => "PDT",
            PosTag::PRP => "PRP",
            PosTag::PRPS => "PRP$",
            PosTag::RB => "RB",
            PosTag::TO => "TO",
            PosTag::UH => "UH",
            PosTag::VB => "VB",
            PosTag::VBD => "VBD",
            PosTag::VBG => "VBG",
            PosTag::VBN => "VBN",
            PosTag::VBP => "VBP",
            PosTag::VBZ => "VBZ",
            PosTag::WDT => "WDT",
            PosTag::WP => "WP",
            PosTag::WPS => "WP$",
            PosTag::WRB => "WRB",
        }
    }
}

impl fmt::Display for PosTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PosTaggedToken {
    pub token: String,
    pub tag: PosTag,
}

pub trait Tagger {
    fn tag(&self, token: &str) -> PosTag;

    fn tag_all(&self, tokens: &[String]) -> Vec<PosTaggedToken> {
        tokens
            .iter()
            .map(|t| PosTaggedToken {
                token: t.clone(),
                tag: self.tag(t),
            })
            .collect()
    }
}

/// Lexicon-and-suffix tagger.
#[derive(Clone, Copy, Debug, Default)]
pub struct RuleTagger;

const LEXICON: &[(&str, PosTag)] = &[
    ("can", PosTag::MD),
    ("could", PosTag::MD),
    ("may", PosTag::MD),
    ("might", PosTag::MD),
    ("must", PosTag::MD),
    ("shall", PosTag::MD),
    ("should", PosTag::MD),
    ("will", PosTag::MD),
    ("would", PosTag::MD),
    ("wilt", PosTag::MD),
    ("shalt", PosTag::MD),
    ("a", PosTag::DT),
    ("an", PosTag::DT),
    ("the", PosTag::DT),
    ("this", PosTag::DT),
    ("that", PosTag::DT),
    ("these", PosTag::DT),
    ("those", PosTag::DT),
    ("every", PosTag::DT),
    ("each", PosTag::DT),
    ("some", PosTag::DT),
    ("any", PosTag::DT),
    ("no", PosTag::DT),
    ("another", PosTag::DT),
    ("all", PosTag::PDT),
    ("both", PosTag::PDT),
    ("i", PosTag::PRP),
    ("me", PosTag::PRP),
    ("we", PosTag::PRP),
    ("us", PosTag::PRP),
    ("you", PosTag::PRP),
    ("he", PosTag::PRP),
    ("him", PosTag::PRP),
    ("she", PosTag::PRP),
    ("it", PosTag::PRP),
    ("they", PosTag::PRP),
    ("them", PosTag::PRP),
    ("thou", PosTag::PRP),
    ("thee", PosTag::PRP),
    ("ye", PosTag::PRP),
    ("myself", PosTag::PRP),
    ("himself", PosTag::PRP),
    ("herself", PosTag::PRP),
    ("itself", PosTag::PRP),
    ("themselves", PosTag::PRP),
    ("my", PosTag::PRPS),
    ("our", PosTag::PRPS),
    ("your", PosTag::PRPS),
    ("his", PosTag::PRPS),
    ("her", PosTag::PRPS),
    ("its", PosTag::PRPS),
    ("their", PosTag::PRPS),
    ("thy", PosTag::PRPS),
    ("thine", PosTag::PRPS),
    ("of", PosTag::IN),
    ("in", PosTag::IN),
    ("on", PosTag::IN),
    ("at", PosTag::IN),
    ("by", PosTag::IN),
    ("for", PosTag::IN),
    ("with", PosTag::IN),
    ("from", PosTag::IN),
    ("into", PosTag::IN),
    ("unto", PosTag::IN),
    ("upon", PosTag::IN),
    ("about", PosTag::IN),
    ("against", PosTag::IN),
    ("among", PosTag::IN),
    ("between", PosTag::IN),
    ("through", PosTag::IN),
    ("during", PosTag::IN),
    ("before", PosTag::IN),
    ("after", PosTag::IN),
    ("above", PosTag::IN),
    ("below", PosTag::IN),
    ("under", PosTag::IN),
    ("over", PosTag::IN),
    ("without", PosTag::IN),
    ("within", PosTag::IN),
    ("because", PosTag::IN),
    ("if", PosTag::IN),
    ("though", PosTag::IN),
    ("as", PosTag::IN),
    ("than", PosTag::IN),
    ("and", PosTag::CC),
    ("or", PosTag::CC),
    ("but", PosTag::CC),
    ("nor", PosTag::CC),
    ("yet", PosTag::CC),
    ("to", PosTag::TO),
    ("there", PosTag::EX),
    ("which", PosTag::WDT),
    ("what", PosTag::WP),
    ("who", PosTag::WP),
    ("whom", PosTag::WP),
    ("whose", PosTag::WPS),
    ("when", PosTag::WRB),
    ("where", PosTag::WRB),
    ("why", PosTag::WRB),
    ("how", PosTag::WRB),
    ("not", PosTag::RB),
    ("very", PosTag::RB),
    ("also", PosTag::RB),
    ("then", PosTag::RB),
    ("now", PosTag::RB),
    ("is", PosTag::VBZ),
    ("has", PosTag::VBZ),
    ("does", PosTag::VBZ),
    ("hath", PosTag::VBZ),
    ("doth", PosTag::VBZ),
    ("are", PosTag::VBP),
    ("am", PosTag::VBP),
    ("be", PosTag::VB),
    ("was", PosTag::VBD),
    ("were", PosTag::VBD),
    ("been", PosTag::VBN),
    ("had", PosTag::VBD),
    ("did", PosTag::VBD),
    ("said", PosTag::VBD),
    ("came", PosTag::VBD),
    ("went", PosTag::VBD),
    ("made", PosTag::VBD),
    ("gave", PosTag::VBD),
    ("took", PosTag::VBD),
    ("saw", PosTag::VBD),
    ("knew", PosTag::VBD),
    ("spake", PosTag::VBD),
    ("spoke", PosTag::VBD),
    ("sent", PosTag::VBD),
    ("brought", PosTag::VBD),
    ("thought", PosTag::VBD),
    ("told", PosTag::VBD),
    ("found", PosTag::VBD),
    ("left", PosTag::VBD),
    ("became", PosTag::VBD),
    ("began", PosTag::VBD),
    ("heard", PosTag::VBD),
    ("kept", PosTag::VBD),
    ("held", PosTag::VBD),
    ("stood", PosTag::VBD),
    ("understood", PosTag::VBD),
    ("taught", PosTag::VBD),
    ("sought", PosTag::VBD),
    ("given", PosTag::VBN),
    ("taken", PosTag::VBN),
    ("known", PosTag::VBN),
    ("seen", PosTag::VBN),
    ("written", PosTag::VBN),
    ("oh", PosTag::UH),
    ("o", PosTag::UH),
    ("lo", PosTag::UH),
    ("behold", PosTag::UH),
    ("one", PosTag::CD),
    ("two", PosTag::CD),
    ("three", PosTag::CD),
    ("four", PosTag::CD),
    ("five", PosTag::CD),
    ("six", PosTag::CD),
    ("seven", PosTag::CD),
    ("eight", PosTag::CD),
    ("nine", PosTag::CD),
    ("ten", PosTag::CD),
    ("hundred", PosTag::CD),
    ("thousand", PosTag::CD),
];

impl RuleTagger {
    fn lookup(token: &str) -> Option<PosTag> {
        LEXICON.iter().find(|(w, _)| *w == token).map(|&(_, t)| t)
    }
}

impl Tagger for RuleTagger {
    fn tag(&self, token: &str) -> PosTag {
        if let Some(tag) = RuleTagger::lookup(token) {
            return tag;
        }
        if token.chars().all(|c| c.is_ascii_digit()) && !token.is_empty() {
            return PosTag::CD;
        }
        let n = token.chars().count();
        if n > 3 && token.ends_with("ed") {
            PosTag::VBD
        } else if n > 4 && token.ends_with("ing") {
            PosTag::VBG
        } else if n > 3 && token.ends_with("ly") {
            PosTag::RB
        } else if n > 3
            && token.ends_with('s')
            && !token.ends_with("ss")
            && !token.ends_with("us")
            && !token.ends_with("is")
        {
            PosTag::NNS
        } else {
            PosTag::NN
        }
    }
}

pub fn pos_tag(tokens: &[String]) -> Vec<PosTaggedToken> {
    RuleTagger.tag_all(tokens)
}
