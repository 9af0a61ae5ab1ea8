//! Corpus analytics for collections of chaptered books.
//!
//! The pipeline runs raw text through preprocessing into a labeled
//! document-term matrix, optionally weights it with TF-IDF, compares chapters
//! and books under several distance measures, and classifies chapters by
//! book with cross-validated grid search.
//!
//! ```
//! use textmine::corpus::{BookLabel, Corpus, RawDocument};
//! use textmine::dtm::build_dtm;
//! use textmine::preprocess::PreprocessConfig;
//!
//! let book = BookLabel::new(0, "Psalter");
//! let corpus = Corpus::new(
//!     vec![book.clone()],
//!     vec![RawDocument::new(book, 1, "God god, the Lord.").unwrap()],
//! )
//! .unwrap();
//! let dtm = build_dtm(&corpus, &PreprocessConfig::default()).unwrap();
//! assert_eq!(dtm.shape(), (1, 2));
//! ```

pub mod classify;
pub mod config;
pub mod corpus;
pub mod distance;
pub mod dtm;
pub mod error;
pub mod evaluate;
pub mod io;
pub mod preprocess;
pub mod rng;
pub mod sparse;

pub use error::{Error, Result};
