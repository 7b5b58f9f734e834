//! Sentences from the confusion families. None holds an endpoint value.

pub const NEGATIVES: &[(&str, &str)] = &[
    ("age", "The median age of the patients was 62 years (range, 35-81 years)."),
    ("age", "Patients aged 65 years or older accounted for 41% of the cohort."),
    ("age", "Mean age at diagnosis was 58.4 ± 9.1 years."),
    ("age", "The median age was 71 years and 54% of patients were male."),
    ("los", "Median length of hospital stay was 7 days (range 3-21 days)."),
    ("los", "The LOS was 5.2 days in the laparoscopic group versus 8.1 days in the open group."),
    ("los", "Length of stay decreased from 9 days to 6 days after the protocol was introduced."),
    ("los", "Mean LOS was 12 days and 30-day readmission occurred in 8% of patients."),
    ("median_duration", "The median duration of treatment was 6.3 months."),
    ("median_duration", "Median duration of follow-up was 48 months (range, 12-96 months)."),
    ("median_duration", "The mean duration of therapy was 14 weeks, and 22% of patients required dose reductions."),
    ("median_duration", "A median duration of exposure of 5.5 months was observed in the safety population."),
    ("deviation", "The mean tumour size was 4.2 cm (standard deviation 1.3 cm)."),
    ("deviation", "Body mass index was 27.1 ± 4.6 kg/m2 and the mean creatinine was 1.1 (SD 0.3)."),
    ("deviation", "Operative time ranged from 120 to 340 minutes (mean 210, SD 45)."),
    ("deviation", "The median PSA level was 8.4 ng/mL (interquartile range 5.1-14.2)."),
    ("bare_percent", "Grade 3 or higher adverse events occurred in 38% of patients."),
    ("bare_percent", "Overall, 72% of the patients completed the planned chemotherapy."),
    ("bare_percent", "Neutropenia was reported in 24.5% and anaemia in 11.2% of cases."),
    ("bare_percent", "A total of 45% of tumours were HER2-positive, and 12% were triple-negative."),
    ("bare_percent", "Of the 120 patients, 64% were women and 36% were men."),
    ("bare_percent", "Treatment was discontinued in 17.5% of patients because of toxicity."),
    ("deviation", "The mean haemoglobin was 11.2 g/dL (SD 1.8) with a range of 7.9-14.6 g/dL."),
    ("los", "The LOS was a median of 4 days, and 12% of patients stayed longer than 7 days."),
];

/// Sentences close to an endpoint mention. The rule tagger must emit nothing,
/// but the sentence filter is allowed to select them.
pub const NEAR_MISSES: &[&str] = &[
    "Stable disease was observed in 32% of patients and progressive disease in 18%.",
    "The partial response rate among evaluable patients was 28%, with complete responses in 6%.",
    "The median time to progression was 5.1 months in the control arm.",
    "Local recurrence-free survival at 5 years was 88%.",
];
