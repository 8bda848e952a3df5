//! Batch pipeline around `mrpcen-core`: dataset manifests, configuration,
//! NPY feature caching, augmentation, detection, and evaluation, exposed
//! through the `mrpcen` binary.

pub mod commands;
pub mod config;
pub mod dataset;
pub mod features;
pub mod manifest;
