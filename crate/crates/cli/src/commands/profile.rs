use gpnet::data::{Dataset, Standardization};
use gpnet::gp::GpPosterior;
use gpnet::scoring::{gp_family_score, FamilyKey, Fitted, ScoreConfig, ScorerId};
use serde::{Deserialize, Serialize};

use super::{column, load_standardized};
use crate::config::Settings;
use crate::error::{usage, CliError};
use crate::output::{csv_bytes, Output, Timings};

/// One grid point; the first three columns are in standardized units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileRow {
    pub u: f64,
    pub mean: f64,
    pub sd: f64,
    pub u_original: f64,
    pub mean_original: f64,
    pub sd_original: f64,
}

/// Fits `child <- {parent}` and evaluates the predictive density of a new
/// observation on `points` evenly spaced values from two units below the
/// smallest to two units above the largest parent value.
pub fn predict_profile(
    data: &Dataset,
    st: &Standardization,
    child: usize,
    parent: usize,
    points: usize,
) -> Result<Vec<ProfileRow>, CliError> {
    if data.kind(child).is_discrete() || data.kind(parent).is_discrete() {
        return Err(usage("predict-profile needs continuous child and parent"));
    }
    let key = FamilyKey::new(child, [parent]).map_err(|e| usage(e.to_string()))?;
    let fitted = gp_family_score(&key, data, &ScoreConfig::default()).map_err(|e| CliError::Compute(e.to_string()))?;
    let Fitted::Gp(theta) = fitted.fitted else { unreachable!("gp score fits a gp") };
    let rows = data.all_rows();
    let post = GpPosterior::fit(data.inputs(&[parent], &rows), data.targets(child, &rows), theta)
        .map_err(|e| CliError::Compute(e.to_string()))?;
    let u = data.column_vector(parent);
    let (lo, hi) = (u.min() - 2.0, u.max() + 2.0);
    let (mu_u, sd_u) = st.columns[parent].expect("continuous column");
    let (mu_x, sd_x) = st.columns[child].expect("continuous column");
    (0..points)
        .map(|i| {
            let x = lo + (hi - lo) * i as f64 / (points - 1) as f64;
            let p = post.predict(&[x]).map_err(|e| CliError::Compute(e.to_string()))?;
            Ok(ProfileRow {
                u: x,
                mean: p.mean,
                sd: p.sd(),
                u_original: x * sd_u + mu_u,
                mean_original: p.mean * sd_x + mu_x,
                sd_original: p.sd() * sd_x,
            })
        })
        .collect()
}

pub fn run(settings: &Settings) -> Result<Output, CliError> {
    if settings.scorer(ScorerId::Gp)? != ScorerId::Gp {
        return Err(usage("predict-profile is defined for the gp scorer only"));
    }
    let mut timings = Timings::default();
    let (data, st) = timings.time("load", || load_standardized(settings))?;
    let child = column(&data, &settings.child()?)?;
    let parent_name = settings.parent.clone().ok_or_else(|| usage("no parent variable given (--parent)"))?;
    let parent = column(&data, &parent_name)?;
    let points = settings.grid_points()?;
    let rows = timings.time("fit", || predict_profile(&data, &st, child, parent, points))?;
    Ok(Output { body: csv_bytes(&rows)?, timings })
}
