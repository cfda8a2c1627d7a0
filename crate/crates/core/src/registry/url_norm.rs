use url::Url;

/// Reduces a URL to `host[/path]`: lowercase host without `www.`, no scheme,
/// port, query, fragment or trailing slash.
pub fn normalize_url(raw: &str) -> Option<String> {
    let raw = raw.trim();
    if raw.is_empty() {
        return None;
    }
    let with_scheme = if raw.contains("://") {
        raw.to_string()
    } else {
        format!("http://{raw}")
    };
    let parsed = Url::parse(&with_scheme).ok()?;
    let host = parsed.host_str()?.to_ascii_lowercase();
    let host = host.strip_prefix("www.").unwrap_or(&host);
    let path = parsed.path().trim_end_matches('/');
    Some(format!("{host}{path}"))
}

/// Segment-aware prefix test on normalized URLs: `arxiv.org` matches
/// `arxiv.org/abs/1` but not `arxiv.org.example.com`.
pub fn url_has_prefix(normalized_url: &str, normalized_prefix: &str) -> bool {
    match normalized_url.strip_prefix(normalized_prefix) {
        Some("") => true,
        Some(rest) => rest.starts_with('/'),
        None => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalizes() {
        assert_eq!(normalize_url("https://arxiv.org/abs/1901.00001").as_deref(), Some("arxiv.org/abs/1901.00001"));
        assert_eq!(normalize_url("HTTP://WWW.Example.ORG:8080/Path/?q=1#frag").as_deref(), Some("example.org/Path"));
        assert_eq!(normalize_url("pub.uni-bielefeld.de").as_deref(), Some("pub.uni-bielefeld.de"));
        assert_eq!(normalize_url("  "), None);
    }

    #[test]
    fn prefix_boundaries() {
        assert!(url_has_prefix("arxiv.org/abs/1", "arxiv.org"));
        assert!(url_has_prefix("arxiv.org", "arxiv.org"));
        assert!(!url_has_prefix("arxiv.org.evil.com/x", "arxiv.org"));
        assert!(!url_has_prefix("arxiv.organic/x", "arxiv.org"));
    }
}
