//! CSV and JSON emission with a stable column order:
//! p,r,n,h,lambda,engine,count,residual,precision,ms.

use crate::spec::lambda_label;
use crate::AppResult;
use diagdeform::counting::{CountReport, DeformParams};
use diagdeform::ffield::FieldCtx;
use diagdeform::wlattice::{DworkProfile, WClassDecomposition, WeightVector};
use serde::Serialize;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

#[derive(Copy, Clone, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl std::fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        })
    }
}

/// Stdout or a file.
pub enum Sink {
    Stdout,
    File(BufWriter<File>),
}

impl Sink {
    pub fn open(path: Option<&Path>) -> AppResult<Sink> {
        Ok(match path {
            None => Sink::Stdout,
            Some(p) => Sink::File(BufWriter::new(File::create(p)?)),
        })
    }

    pub fn line(&mut self, s: &str) -> AppResult<()> {
        match self {
            Sink::Stdout => {
                let mut out = std::io::stdout().lock();
                if let Err(e) = writeln!(out, "{s}") {
                    if e.kind() == std::io::ErrorKind::BrokenPipe {
                        std::process::exit(0);
                    }
                    return Err(e.into());
                }
            }
            Sink::File(f) => writeln!(f, "{s}")?,
        }
        Ok(())
    }
}

/// One sweep/count row; field order fixes the CSV column order.
#[derive(Clone, Debug, Serialize)]
pub struct SweepRow {
    pub p: u64,
    pub r: u32,
    pub n: u32,
    pub h: String,
    pub lambda: String,
    pub engine: String,
    pub count: u64,
    pub residual: Option<f64>,
    pub precision: String,
    pub ms: f64,
}

impl SweepRow {
    pub fn new(field: &FieldCtx, dp: &DeformParams, rep: &CountReport) -> SweepRow {
        SweepRow {
            p: field.p(),
            r: field.r(),
            n: dp.n,
            h: dp
                .h
                .iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join("-"),
            lambda: lambda_label(field, dp.lambda),
            engine: rep.engine.name().into(),
            count: rep.count,
            residual: rep.residual,
            precision: rep.precision.clone(),
            ms: rep.millis,
        }
    }

    fn csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{:.3}",
            self.p,
            self.r,
            self.n,
            self.h,
            self.lambda,
            self.engine,
            self.count,
            self.residual
                .map(|r| format!("{r:.3e}"))
                .unwrap_or_default(),
            self.precision,
            self.ms
        )
    }
}

pub const CSV_HEADER: &str = "p,r,n,h,lambda,engine,count,residual,precision,ms";

pub fn write_sweep(sink: &mut Sink, format: OutputFormat, rows: &[SweepRow]) -> AppResult<()> {
    match format {
        OutputFormat::Csv => {
            sink.line(CSV_HEADER)?;
            for row in rows {
                sink.line(&row.csv())?;
            }
        }
        OutputFormat::Json => {
            sink.line(&serde_json::to_string_pretty(rows).expect("serializable"))?;
        }
    }
    Ok(())
}

pub fn write_reports(
    sink: &mut Sink,
    format: OutputFormat,
    field: &FieldCtx,
    dp: &DeformParams,
    reports: &[CountReport],
) -> AppResult<()> {
    let rows: Vec<SweepRow> = reports
        .iter()
        .map(|r| SweepRow::new(field, dp, r))
        .collect();
    write_sweep(sink, format, &rows)
}

// ---- wset JSON ----

#[derive(Serialize)]
pub struct WsetDto {
    pub t: u32,
    pub count: usize,
    pub vectors: Vec<Vec<u32>>,
    pub classes: Vec<ClassDto>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub profiles: Vec<ProfileDto>,
}

#[derive(Serialize)]
pub struct ClassDto {
    pub members: Vec<Vec<u32>>,
    pub representative: Vec<u32>,
    pub zero_representative: Vec<u32>,
}

#[derive(Serialize)]
pub struct ProfileDto {
    pub w: Vec<u32>,
    pub n_k: Vec<u32>,
    pub s_missing: Vec<u32>,
    pub s_present: Vec<u32>,
    pub a: Vec<String>,
    pub b: Vec<String>,
}

impl ProfileDto {
    pub fn new(w: &WeightVector, prof: &DworkProfile) -> ProfileDto {
        ProfileDto {
            w: w.w.clone(),
            n_k: prof.n_k.clone(),
            s_missing: prof.s_missing.clone(),
            s_present: prof.s_present.clone(),
            a: prof.a_list.iter().map(|x| x.to_string()).collect(),
            b: prof.b_list.iter().map(|x| x.to_string()).collect(),
        }
    }
}

impl WsetDto {
    pub fn new(
        t: u32,
        wset: &[WeightVector],
        dec: &WClassDecomposition,
        profiles: Vec<ProfileDto>,
    ) -> WsetDto {
        WsetDto {
            t,
            count: wset.len(),
            vectors: wset.iter().map(|w| w.w.clone()).collect(),
            classes: dec
                .classes
                .iter()
                .map(|c| ClassDto {
                    members: c.members.iter().map(|m| m.w.clone()).collect(),
                    representative: c.representative().w.clone(),
                    zero_representative: c.zero_representative().w.clone(),
                })
                .collect(),
            profiles,
        }
    }
}
