//! Published example sentences with their gold spans and resolved
//! observations.

use oncoextract::resolver::EndpointObservation;
use oncoextract::schema::{parse_class, EntitySpan};

pub struct Fixture {
    pub text: &'static str,
    /// `(surface, class)` in sentence order. Each surface is searched for
    /// after the start of the previous one.
    pub gold: &'static [(&'static str, &'static str)],
    /// `endpoint measure value [ci low-high] [@ time point] construction`
    pub observations: &'static [&'static str],
    pub ambiguous: bool,
}

pub const FIXTURES: &[Fixture] = &[
    Fixture {
        text: "3-, 5- and 10-year survival rates were 45%, 40% and 35%, respectively.",
        gold: &[
            ("3-", "time_point"),
            ("5-", "time_point"),
            ("10-year", "time_point"),
            ("45%", "OS_percent"),
            ("40%", "OS_percent"),
            ("35%", "OS_percent"),
        ],
        observations: &[
            "OS percent 45 @ 3 years respectively",
            "OS percent 40 @ 5 years respectively",
            "OS percent 35 @ 10 years respectively",
        ],
        ambiguous: false,
    },
    Fixture {
        text: "Estimated 1-year PFS rates were 78.2% (95% CI 70.2-84.2) and 83.0% (95% CI 75.0-88.6) for PF-05280586 and rituximab-EU, respectively.",
        gold: &[
            ("1-year", "time_point"),
            ("78.2%", "PFS_percent"),
            ("70.2", "PFS_percent_CIL"),
            ("84.2", "PFS_percent_CIH"),
            ("83.0%", "PFS_percent"),
            ("75.0", "PFS_percent_CIL"),
            ("88.6", "PFS_percent_CIH"),
        ],
        observations: &[
            "PFS percent 78.2 ci 70.2-84.2 @ 1 years respectively",
            "PFS percent 83.0 ci 75.0-88.6 @ 1 years respectively",
        ],
        ambiguous: false,
    },
    Fixture {
        text: "The 5-year overall survival (OS) and disease-free survival rates were as follows: normal group, 82.5 and 76.8%; emphysema group, 80.0 and 74.9%; fibrosis group, 46.9 and 50%; and CPFE group, 36.9 and 27.9%, respectively ($p < 0.01$).",
        gold: &[
            ("5-year", "time_point"),
            ("82.5", "OS_percent"),
            ("76.8%", "DFS_percent"),
            ("80.0", "OS_percent"),
            ("74.9%", "DFS_percent"),
            ("46.9", "OS_percent"),
            ("50%", "DFS_percent"),
            ("36.9", "OS_percent"),
            ("27.9%", "DFS_percent"),
        ],
        observations: &[
            "OS percent 82.5 @ 5 years respectively",
            "DFS percent 76.8 @ 5 years respectively",
            "OS percent 80.0 @ 5 years respectively",
            "DFS percent 74.9 @ 5 years respectively",
            "OS percent 46.9 @ 5 years respectively",
            "DFS percent 50 @ 5 years respectively",
            "OS percent 36.9 @ 5 years respectively",
            "DFS percent 27.9 @ 5 years respectively",
        ],
        ambiguous: false,
    },
    Fixture {
        text: "The objective response rate was 97.8%; the median progression-free survival and OS were 11.0 and 27.0 months, respectively.",
        gold: &[("97.8%", "ORR"), ("11.0", "PFS"), ("27.0 months", "OS")],
        observations: &[
            "ORR percent 97.8 simple",
            "PFS duration 11.0 months respectively",
            "OS duration 27.0 months respectively",
        ],
        ambiguous: false,
    },
    Fixture {
        text: "The 1-year LRFS, distant metastasis-free survival, disease-free survival, and overall survival rates were 78.2%, 78%, 69.8%, and 90.2%, respectively; the 3-year rates were 50.6%, 41.2%, 31.2%, and 66.3%, respectively.",
        gold: &[
            ("1-year", "time_point"),
            ("69.8%", "DFS_percent"),
            ("90.2%", "OS_percent"),
            ("3-year", "time_point"),
            ("31.2%", "DFS_percent"),
            ("66.3%", "OS_percent"),
        ],
        observations: &[
            "DFS percent 69.8 @ 1 years respectively",
            "OS percent 90.2 @ 1 years respectively",
            "DFS percent 31.2 @ 3 years respectively",
            "OS percent 66.3 @ 3 years respectively",
        ],
        ambiguous: false,
    },
    Fixture {
        text: "Both disease-free survival (DFS) and overall survival (OS) were significantly worse in the CD8-Low/FoxP3-High group than the other groups (5-year DFS: 66.3% vs. 90.5%; $P = 0.0007$, 5-year OS: 90.9% vs. 97.0%; $P = 0.0077$).",
        gold: &[
            ("5-year", "time_point"),
            ("66.3%", "DFS_percent"),
            ("90.5%", "DFS_percent"),
            ("5-year", "time_point"),
            ("90.9%", "OS_percent"),
            ("97.0%", "OS_percent"),
        ],
        observations: &[
            "DFS percent 66.3 @ 5 years comparison",
            "DFS percent 90.5 @ 5 years comparison",
            "OS percent 90.9 @ 5 years comparison",
            "OS percent 97.0 @ 5 years comparison",
        ],
        ambiguous: false,
    },
    Fixture {
        text: "overall survival in all randomly assigned patients was significantly longer in the experimental group than in the control group (median 14.1 months [95% CI 13.2-16.2] vs 10.7 months [9.5-12.4])",
        gold: &[
            ("14.1 months", "OS"),
            ("13.2", "OS_CIL"),
            ("16.2", "OS_CIH"),
            ("10.7 months", "OS"),
            ("9.5", "OS_CIL"),
            ("12.4", "OS_CIH"),
        ],
        observations: &[
            "OS duration 14.1 months ci 13.2-16.2 comparison",
            "OS duration 10.7 months ci 9.5-12.4 comparison",
        ],
        ambiguous: false,
    },
    Fixture {
        text: "7-year PFS of FL patients on RB therapy was 70% (95% CI 75-99)",
        gold: &[
            ("7-year", "time_point"),
            ("70%", "PFS_percent"),
            ("75", "PFS_percent_CIL"),
            ("99", "PFS_percent_CIH"),
        ],
        observations: &["PFS percent 70 ci 75-99 @ 7 years simple"],
        ambiguous: false,
    },
    Fixture {
        text: "A partial response to AG with a mean duration of 9 months (range: 4-26 months) was achieved in 24 patients (33%), 10 patients (14%) had stable disease, and 32 patients (44%) were progressing during AG therapy.",
        gold: &[],
        observations: &[],
        ambiguous: false,
    },
    Fixture {
        text: "According to the intent-to-treat analysis, 14/58 objective responses (24.1%) and 24/58 (41.3%) stabilizations of disease were observed, with a median duration of 4 months (range, 2-22 + months) and 5 months (range, 1-13 months), respectively.",
        gold: &[("24.1%", "ORR"), ("4 months", "DoR")],
        observations: &["ORR percent 24.1 respectively", "DoR duration 4 months respectively"],
        ambiguous: false,
    },
    Fixture {
        text: "In the propensity score matched lobectomy and segmentectomy groups (87 patients per group), the 5-year and 10-year OS and PFS rates were 85% versus 84% and 66% versus 63%, respectively.",
        gold: &[
            ("5-year", "time_point"),
            ("10-year", "time_point"),
            ("85%", "OS_percent"),
            ("84%", "PFS_percent"),
            ("66%", "OS_percent"),
            ("63%", "PFS_percent"),
        ],
        observations: &[
            "OS percent 85 @ 5 years combined",
            "PFS percent 84 @ 5 years combined",
            "OS percent 66 @ 10 years combined",
            "PFS percent 63 @ 10 years combined",
        ],
        ambiguous: true,
    },
];

pub fn gold_spans(f: &Fixture) -> Vec<EntitySpan> {
    let mut from = 0;
    let mut spans = Vec::new();
    for (surface, label) in f.gold {
        let byte = from + f.text[from..].find(surface).unwrap_or_else(|| panic!("`{surface}` in `{}`", f.text));
        let start = f.text[..byte].chars().count();
        let end = start + surface.chars().count();
        spans.push(EntitySpan::new(f.text, start, end, parse_class(label).unwrap()).unwrap());
        from = byte;
    }
    spans.sort();
    spans
}

pub fn describe(o: &EndpointObservation) -> String {
    let mut s = format!("{} {} {}", o.base, o.measure, o.value);
    if o.measure == oncoextract::schema::Measure::Duration {
        s += &format!(" {}", o.unit);
    }
    if let (Some(lo), Some(hi)) = (o.ci_low, o.ci_high) {
        s += &format!(" ci {lo}-{hi}");
    }
    if let Some(tp) = o.time_point {
        s += &format!(" @ {} {}", tp.value, tp.unit);
    }
    s + " " + o.construction.as_str()
}

