use crate::classify::match_license;
use crate::ingest::LicenseStatement;
use crate::model::PartialDate;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArticleLicenses {
    pub publication_date: PartialDate,
    pub licenses: Vec<LicenseStatement>,
}

/// Earliest effective delay among the article's open licenses that carry
/// delay information (an explicit delay or a start date).
pub fn article_delay(article: &ArticleLicenses, patterns: &[String]) -> Option<i64> {
    article
        .licenses
        .iter()
        .filter(|l| l.delay_days.is_some() || l.start_date.is_some())
        .filter(|l| match_license(&l.url, patterns))
        .map(|l| l.effective_delay(&article.publication_date))
        .min()
}

/// Embargo length in days suggested by license delays across a journal's
/// articles, or `None` when fewer than half of the open-licensed articles
/// become open after the grace period. Exactly half qualifies. The result is
/// the median of the delayed articles' delays (lower median for even counts).
pub fn detect_delayed_from_metadata(articles: &[ArticleLicenses], grace_days: u32, patterns: &[String]) -> Option<u32> {
    let delays: Vec<i64> = articles.iter().filter_map(|a| article_delay(a, patterns)).collect();
    let mut late: Vec<i64> = delays.iter().copied().filter(|d| *d > i64::from(grace_days)).collect();
    if late.is_empty() || late.len() * 2 < delays.len() {
        return None;
    }
    late.sort_unstable();
    u32::try_from(late[(late.len() - 1) / 2]).ok()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::default_license_patterns;

    fn article(delay: u32) -> ArticleLicenses {
        ArticleLicenses {
            publication_date: "2019-01-01".parse().unwrap(),
            licenses: vec![LicenseStatement {
                delay_days: Some(delay),
                ..LicenseStatement::new("https://creativecommons.org/licenses/by/4.0/")
            }],
        }
    }

    fn run(delays: &[u32]) -> Option<u32> {
        let a: Vec<_> = delays.iter().map(|&d| article(d)).collect();
        detect_delayed_from_metadata(&a, 30, &default_license_patterns())
    }

    #[test]
    fn examples() {
        assert_eq!(run(&[365, 370, 360]), Some(365));
        assert_eq!(run(&[0, 0, 0]), None);
        // exactly half delayed qualifies
        assert_eq!(run(&[0, 365]), Some(365));
        assert_eq!(run(&[0, 0, 365]), None);
        assert_eq!(run(&[]), None);
        assert_eq!(run(&[180, 365, 400, 730]), Some(365));
    }

    #[test]
    fn ignores_closed_licenses_and_missing_delay_info() {
        let mut a = article(365);
        a.licenses[0].url = "https://www.elsevier.com/tdm/userlicense/1.0/".into();
        let mut b = article(0);
        b.licenses[0].delay_days = None;
        assert_eq!(detect_delayed_from_metadata(&[a, b], 30, &default_license_patterns()), None);
    }

    #[test]
    fn earliest_open_license_counts() {
        let mut a = article(365);
        a.licenses.push(LicenseStatement { delay_days: Some(0), ..LicenseStatement::new("https://creativecommons.org/licenses/by-nc/4.0/") });
        assert_eq!(article_delay(&a, &default_license_patterns()), Some(0));
    }
}
