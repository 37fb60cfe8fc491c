use super::pbtxt::TextMessage;
use crate::error::{Error, Result};
use crate::model::Precision;

const CYCLES: &str = "sm__cycles_elapsed.avg";
const SM_FREQUENCY: &str = "sm__cycles_elapsed.avg.per_second";

/// (level, bytes metric, clock metric of the unit that moves them)
const LEVEL_BYTES: [(&str, &str, &str); 3] = [
    ("L1", "l1tex__t_bytes.sum", "l1tex__cycles_elapsed.avg.per_second"),
    ("L2", "lts__t_bytes.sum", "lts__cycles_elapsed.avg.per_second"),
    ("HBM", "dram__bytes.sum", "dram__cycles_elapsed.avg.per_second"),
];

/// Custom Nsight Compute section describing a hierarchical Roofline chart.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SectionFileSpec {
    pub identifier: String,
    pub display_name: String,
    pub precision: Precision,
    pub metrics: Vec<String>,
}

fn precision_word(p: Precision) -> Result<&'static str> {
    match p {
        Precision::Fp64 => Ok("Double"),
        Precision::Fp32 => Ok("Single"),
        Precision::Fp16 => Ok("Half"),
        Precision::Tensor => Err(tensor_unsupported()),
    }
}

fn tensor_unsupported() -> Error {
    Error::config(
        "$.precision",
        "tensor-core rooflines are not supported in section files; use FP64, FP32 or FP16",
    )
}

/// (add, mul, fma) instruction metrics for one precision.
fn flop_metrics(p: Precision) -> Result<[String; 3]> {
    let c = match p {
        Precision::Fp64 => 'd',
        Precision::Fp32 => 'f',
        Precision::Fp16 => 'h',
        Precision::Tensor => return Err(tensor_unsupported()),
    };
    Ok(["add", "mul", "fma"].map(|op| format!("sm__sass_thread_inst_executed_op_{c}{op}_pred_on.sum")))
}

fn is_token(s: &str, extra: &[char]) -> bool {
    let mut chars = s.chars();
    chars.next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || extra.contains(&c))
}

impl SectionFileSpec {
    /// The standard hierarchical chart for `precision`: time, the add/mul/fma
    /// instruction counts of that precision and the L1, L2 and HBM byte counts.
    pub fn hierarchical(precision: Precision) -> Result<Self> {
        let word = precision_word(precision)?;
        let mut metrics = vec![CYCLES.to_string(), SM_FREQUENCY.to_string()];
        metrics.extend(flop_metrics(precision)?);
        metrics.extend(LEVEL_BYTES.iter().map(|l| l.1.to_string()));
        Ok(SectionFileSpec {
            identifier: format!("SpeedOfLight_Hierarchical{word}RooflineChart"),
            display_name: format!("GPU Speed Of Light Hierarchical Roofline Chart ({word} Precision)"),
            precision,
            metrics,
        })
    }

    pub fn validate(&self) -> Result<()> {
        precision_word(self.precision)?;
        if !is_token(&self.identifier, &[]) {
            return Err(Error::config(
                "$.identifier",
                format!("{:?} is not a valid section identifier", self.identifier),
            ));
        }
        if self.metrics.is_empty() {
            return Err(Error::config("$.metrics", "metric list is empty"));
        }
        for (i, m) in self.metrics.iter().enumerate() {
            if !is_token(m, &['.']) {
                return Err(Error::config(format!("$.metrics[{i}]"), format!("{m:?} is not a metric name")));
            }
        }
        Ok(())
    }
}

fn metric(label: &str, name: &str) -> TextMessage {
    TextMessage::new().str("Label", label).str("Name", name)
}

fn metric_label(name: &str) -> String {
    if name == CYCLES {
        return "SM Cycles Elapsed".into();
    }
    if name == SM_FREQUENCY {
        return "SM Frequency".into();
    }
    if let Some(op) = name
        .strip_prefix("sm__sass_thread_inst_executed_op_")
        .and_then(|r| r.strip_suffix("_pred_on.sum"))
    {
        return format!("Predicated-On {} Thread Instructions Executed", op.to_ascii_uppercase());
    }
    if let Some((level, _, _)) = LEVEL_BYTES.iter().find(|l| l.1 == name) {
        return format!("{level} Bytes");
    }
    name.to_string()
}

fn cycles_expression(values: Vec<TextMessage>, clock_label: &str, clock: &str) -> TextMessage {
    let mut e = TextMessage::new();
    for v in values {
        e = e.message("ValuePerCycleMetrics", v);
    }
    e.message("CyclesPerSecondMetric", metric(clock_label, clock))
}

/// Emits the section as protocol-buffer text. Chart rooflines and achieved
/// points are generated for every byte metric of a known level present in
/// `spec.metrics`; every listed metric is collected.
pub fn emit_section_file(spec: &SectionFileSpec) -> Result<String> {
    spec.validate()?;
    let word = precision_word(spec.precision)?;
    let [add, mul, fma] = flop_metrics(spec.precision)?;
    let has = |m: &str| spec.metrics.iter().any(|x| x == m);

    let mut metrics = TextMessage::new();
    for m in &spec.metrics {
        metrics = metrics.message("Metrics", metric(&metric_label(m), m));
    }

    let mut chart = TextMessage::new()
        .str("Label", format!("Hierarchical {word} Precision Roofline"))
        .message("AxisIntensity", TextMessage::new().str("Label", "Arithmetic Intensity [FLOP/byte]"))
        .message("AxisWork", TextMessage::new().str("Label", "Performance [FLOP/s]"));

    let levels: Vec<_> = LEVEL_BYTES.iter().filter(|l| has(l.1)).collect();
    let fma_peak = format!("{fma}.peak_sustained");
    for (level, bytes, clock) in &levels {
        let peak_work = cycles_expression(
            vec![metric(&format!("Theoretical {} Per Cycle", metric_label(&fma)), &fma_peak).number("Multiplier", 2)],
            "SM Frequency",
            SM_FREQUENCY,
        );
        let peak_traffic = cycles_expression(
            vec![metric(&format!("Theoretical {level} Bytes Per Cycle"), &format!("{bytes}.peak_sustained"))],
            &format!("{level} Frequency"),
            clock,
        );
        chart = chart.message(
            "Rooflines",
            TextMessage::new()
                .message("PeakWork", TextMessage::new().message("ValueCyclesPerSecondExpression", peak_work))
                .message("PeakTraffic", TextMessage::new().message("ValueCyclesPerSecondExpression", peak_traffic))
                .message("Options", TextMessage::new().str("Label", format!("{level} {word} Precision Roofline"))),
        );
    }

    let mut work_terms = Vec::new();
    for (name, weight) in [(&add, 1), (&mul, 1), (&fma, 2)] {
        if has(name) {
            let m = metric(
                &format!("{} Per Cycle", metric_label(name)),
                &format!("{}.per_cycle_elapsed", name),
            );
            work_terms.push(if weight == 1 { m } else { m.number("Multiplier", weight) });
        }
    }
    if !work_terms.is_empty() {
        for (level, bytes, _) in &levels {
            let work = cycles_expression(work_terms.clone(), "SM Frequency", SM_FREQUENCY);
            chart = chart.message(
                "AchievedValues",
                TextMessage::new()
                    .message("AchievedWork", TextMessage::new().message("ValueCyclesPerSecondExpression", work))
                    .message(
                        "AchievedTraffic",
                        TextMessage::new().message(
                            "Metric",
                            metric(&format!("{level} Bandwidth"), &format!("{bytes}.per_second")),
                        ),
                    )
                    .message("Options", TextMessage::new().str("Label", format!("{level} Achieved Value"))),
            );
        }
    }

    let doc = TextMessage::new()
        .str("Identifier", spec.identifier.as_str())
        .str("DisplayName", spec.display_name.as_str())
        .str("Extends", "SpeedOfLight")
        .str(
            "Description",
            format!("{word} precision Roofline of the kernel against the L1, L2 and device memory ceilings."),
        )
        .number("Order", 12)
        .message("Sets", TextMessage::new().str("Identifier", "roofline"))
        .message("Metrics", metrics)
        .message(
            "Body",
            TextMessage::new()
                .str("DisplayName", "SOL Rooflines")
                .message("Items", TextMessage::new().message("RooflineChart", chart)),
        );
    Ok(doc.to_text())
}
