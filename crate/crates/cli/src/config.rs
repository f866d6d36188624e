//! Run configuration: TOML file values overridden by command-line flags.

use anyhow::{Context, Result};
use finsent::calendar::{parse_offset, SessionHours};
use finsent::classifier::{LossKind, TrainConfig};
use finsent::econometrics::ReturnKind;
use finsent::sentindex::{EmptyBucketPolicy, SessionPhase};
use finsent::vectorizer::SpaceKind;
use chrono::{FixedOffset, NaiveTime};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

/// Raw, partially-specified configuration as read from `--config` TOML.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub entity_db: Option<PathBuf>,
    pub lexicon: Option<PathBuf>,
    pub headlines: Option<PathBuf>,
    pub instances: Option<PathBuf>,
    pub prices: Option<PathBuf>,
    pub calendar: Option<PathBuf>,
    pub constituency: Option<PathBuf>,
    pub events: Option<PathBuf>,
    pub series: Option<PathBuf>,
    pub model: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub representation: Option<String>,
    pub loss: Option<String>,
    pub splits: Option<usize>,
    pub train_frac: Option<f64>,
    pub timezone: Option<String>,
    pub session_open: Option<String>,
    pub session_close: Option<String>,
    pub measure: Option<String>,
    pub duration: Option<String>,
    pub returns: Option<String>,
    pub policy: Option<String>,
    pub ma_window: Option<usize>,
    pub p1_max: Option<usize>,
    pub p2_max: Option<usize>,
    #[serde(default)]
    pub train: TrainSection,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainSection {
    pub learning_rate: Option<f64>,
    pub lr_decay: Option<f64>,
    pub epochs: Option<usize>,
    pub l2: Option<f64>,
    pub batch_size: Option<usize>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config file {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("bad config file {}", path.display()))
    }
}

/// Fully resolved settings for one command run. Serialized (as JSON) to
/// compute the config hash recorded in every output's manifest.
#[derive(Clone, Debug, Serialize)]
pub struct Settings {
    pub entity_db: Option<PathBuf>,
    pub lexicon: Option<PathBuf>,
    pub headlines: Option<PathBuf>,
    pub instances: Option<PathBuf>,
    pub prices: Option<PathBuf>,
    pub calendar: Option<PathBuf>,
    pub constituency: Option<PathBuf>,
    pub events: Option<PathBuf>,
    pub series: Option<PathBuf>,
    pub model: Option<PathBuf>,
    pub out: PathBuf,
    pub seed: u64,
    pub representation: SpaceKind,
    pub loss: LossKind,
    pub splits: usize,
    pub train_frac: f64,
    pub timezone: String,
    pub session_open: String,
    pub session_close: String,
    pub measure: Measure,
    pub duration: SessionPhase,
    pub returns: ReturnKind,
    pub policy: EmptyBucketPolicy,
    pub ma_window: Option<usize>,
    pub p1_max: usize,
    pub p2_max: usize,
    pub learning_rate: f64,
    pub lr_decay: f64,
    pub epochs: usize,
    pub l2: f64,
    pub batch_size: usize,
}

/// Which sentiment measure a command operates on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Measure {
    S1,
    S2,
}

impl Measure {
    pub fn is_s2(self) -> bool {
        matches!(self, Measure::S2)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Measure::S1 => "s1",
            Measure::S2 => "s2",
        }
    }
}

impl std::str::FromStr for Measure {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "s1" => Ok(Measure::S1),
            "s2" => Ok(Measure::S2),
            other => anyhow::bail!("unknown measure `{other}` (expected s1 or s2)"),
        }
    }
}

impl Default for Settings {
    fn default() -> Self {
        let train = TrainConfig::default();
        Settings {
            entity_db: None,
            lexicon: None,
            headlines: None,
            instances: None,
            prices: None,
            calendar: None,
            constituency: None,
            events: None,
            series: None,
            model: None,
            out: PathBuf::from("out"),
            seed: 0,
            representation: SpaceKind::Ubt,
            loss: LossKind::Hinge,
            splits: 31,
            train_frac: 0.8,
            timezone: "+05:30".to_string(),
            session_open: "09:30".to_string(),
            session_close: "15:30".to_string(),
            measure: Measure::S2,
            duration: SessionPhase::AfterMarket,
            returns: ReturnKind::Log,
            policy: EmptyBucketPolicy::Skip,
            ma_window: None,
            p1_max: 3,
            p2_max: 3,
            learning_rate: train.learning_rate,
            lr_decay: train.lr_decay,
            epochs: train.epochs,
            l2: train.l2,
            batch_size: train.batch_size,
        }
    }
}

impl Settings {
    /// Layer a TOML file config over the defaults.
    pub fn apply_file(&mut self, file: &FileConfig) -> Result<()> {
        macro_rules! copy_path {
            ($field:ident) => {
                if let Some(v) = &file.$field {
                    self.$field = Some(v.clone());
                }
            };
        }
        copy_path!(entity_db);
        copy_path!(lexicon);
        copy_path!(headlines);
        copy_path!(instances);
        copy_path!(prices);
        copy_path!(calendar);
        copy_path!(constituency);
        copy_path!(events);
        copy_path!(series);
        copy_path!(model);
        if let Some(v) = &file.out {
            self.out = v.clone();
        }
        if let Some(v) = file.seed {
            self.seed = v;
        }
        if let Some(v) = &file.representation {
            self.representation = v.parse()?;
        }
        if let Some(v) = &file.loss {
            self.loss = v.parse()?;
        }
        if let Some(v) = file.splits {
            self.splits = v;
        }
        if let Some(v) = file.train_frac {
            self.train_frac = v;
        }
        if let Some(v) = &file.timezone {
            self.timezone = v.clone();
        }
        if let Some(v) = &file.session_open {
            self.session_open = v.clone();
        }
        if let Some(v) = &file.session_close {
            self.session_close = v.clone();
        }
        if let Some(v) = &file.measure {
            self.measure = v.parse()?;
        }
        if let Some(v) = &file.duration {
            self.duration = v.parse()?;
        }
        if let Some(v) = &file.returns {
            self.returns = v.parse()?;
        }
        if let Some(v) = &file.policy {
            self.policy = v.parse()?;
        }
        if file.ma_window.is_some() {
            self.ma_window = file.ma_window;
        }
        if let Some(v) = file.p1_max {
            self.p1_max = v;
        }
        if let Some(v) = file.p2_max {
            self.p2_max = v;
        }
        if let Some(v) = file.train.learning_rate {
            self.learning_rate = v;
        }
        if let Some(v) = file.train.lr_decay {
            self.lr_decay = v;
        }
        if let Some(v) = file.train.epochs {
            self.epochs = v;
        }
        if let Some(v) = file.train.l2 {
            self.l2 = v;
        }
        if let Some(v) = file.train.batch_size {
            self.batch_size = v;
        }
        Ok(())
    }

    pub fn train_config(&self) -> TrainConfig {
        TrainConfig {
            loss: self.loss,
            learning_rate: self.learning_rate,
            lr_decay: self.lr_decay,
            epochs: self.epochs,
            l2: self.l2,
            batch_size: self.batch_size,
            seed: self.seed,
        }
    }

    pub fn tz(&self) -> Result<FixedOffset> {
        parse_offset(&self.timezone).map_err(Into::into)
    }

    pub fn session_hours(&self) -> Result<SessionHours> {
        let open = NaiveTime::parse_from_str(&self.session_open, "%H:%M")
            .with_context(|| format!("bad session_open `{}`", self.session_open))?;
        let close = NaiveTime::parse_from_str(&self.session_close, "%H:%M")
            .with_context(|| format!("bad session_close `{}`", self.session_close))?;
        anyhow::ensure!(open < close, "session_open must precede session_close");
        Ok(SessionHours::new(open, close))
    }

    /// Required-path accessor with an error naming the flag to set.
    pub fn require(&self, field: &Option<PathBuf>, flag: &str) -> Result<PathBuf> {
        let path = field
            .clone()
            .ok_or_else(|| anyhow::anyhow!("missing input path: set --{flag} or `{}` in --config", flag.replace('-', "_")))?;
        anyhow::ensure!(path.exists(), "input path {} (--{flag}) does not exist", path.display());
        Ok(path)
    }
}
