/// Lowercases and strips scheme, `www.` and trailing slashes.
pub fn normalize_license_url(url: &str) -> String {
    let lower = url.trim().to_lowercase();
    let no_scheme = match lower.find("://") {
        Some(i) => &lower[i + 3..],
        None => &lower,
    };
    let no_www = no_scheme.strip_prefix("www.").unwrap_or(no_scheme);
    no_www.trim_end_matches('/').to_string()
}

/// Glob match where `*` spans any run of characters.
fn glob(pattern: &str, text: &str) -> bool {
    let parts: Vec<&str> = pattern.split('*').collect();
    if parts.len() == 1 {
        return pattern == text;
    }
    let (first, last) = (parts[0], parts[parts.len() - 1]);
    if !text.starts_with(first) || text.len() < first.len() + last.len() || !text.ends_with(last) {
        return false;
    }
    let mut rest = &text[first.len()..text.len() - last.len()];
    for mid in &parts[1..parts.len() - 1] {
        match rest.find(mid) {
            Some(i) => rest = &rest[i + mid.len()..],
            None => return false,
        }
    }
    true
}

/// Whether a license URL is an open (reuse-granting) license.
pub fn match_license(url: &str, patterns: &[String]) -> bool {
    let normalized = normalize_license_url(url);
    if normalized.is_empty() {
        return false;
    }
    patterns.iter().any(|p| {
        let p = normalize_license_url(p);
        glob(&p, &normalized) || p.strip_suffix("/*").is_some_and(|base| base == normalized)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::default_license_patterns;

    #[test]
    fn default_patterns() {
        let p = default_license_patterns();
        assert!(match_license("https://creativecommons.org/licenses/by/4.0/", &p));
        assert!(match_license("http://creativecommons.org/licenses/by-nc-nd/3.0", &p));
        assert!(match_license("HTTPS://CreativeCommons.org/publicdomain/zero/1.0/", &p));
        assert!(!match_license("https://www.elsevier.com/tdm/userlicense/1.0/", &p));
        assert!(!match_license("https://creativecommons.org/about", &p));
        assert!(!match_license("", &p));
        assert!(!match_license("https://evil.example/creativecommons.org/licenses/by", &p));
    }

    #[test]
    fn glob_matching() {
        assert!(glob("a*c", "abbbc"));
        assert!(glob("a*b*c", "axbyc"));
        assert!(!glob("a*b*c", "axyc"));
        assert!(glob("abc", "abc"));
        assert!(!glob("ab*ba", "aba"));
    }
}
