/**
 * Regex-stage text cleanup mirroring the toolkit's preprocessing: delete
 * traceback blocks, replace URLs with <URL>, drop commit-hash-like hex
 * runs, swap project names for internal/external sentinels, strip special
 * characters and digits, lowercase. Tokenize/stopword/lemma steps are
 * deliberately NOT reproduced here; the downstream transformer brings its
 * own subword tokenizer.
 */

const TRACEBACK_RE =
  /^Traceback \(most recent call last\):[^\n]*\n?(?:[ \t]+[^\n]*\n?)*/gm;
const URL_RE = /(?:https?:\/\/|www\.)\S+/gi;
const HEX_RE = /\b(?=[0-9a-fA-F]*\d)[0-9a-fA-F]{7,40}\b/g;
const STRIP_RE = /[^A-Za-z<>_\-\s]+/g;

function escapeRegExp(text: string): string {
  return text.replace(/[.*+?^${}()|[\]\\]/g, "\\$&");
}

export function cleanText(
  raw: string,
  ownProject: string,
  knownProjects: Iterable<string>,
): string {
  let text = raw.replace(TRACEBACK_RE, " ");
  text = text.replace(URL_RE, " <URL> ");
  text = text.replace(HEX_RE, " ");
  const names = [...new Set([...knownProjects, ownProject])]
    .filter((n) => n.length > 0)
    .sort((a, b) => b.length - a.length);
  if (names.length > 0) {
    const projectRe = new RegExp(
      `\\b(?:${names.map(escapeRegExp).join("|")})\\b`,
      "gi",
    );
    const own = ownProject.toLowerCase();
    text = text.replace(projectRe, (match) =>
      match.toLowerCase() === own
        ? " <internal project> "
        : " <external project> ",
    );
  }
  text = text.replace(STRIP_RE, " ");
  return text.toLowerCase().split(/\s+/).filter(Boolean).join(" ");
}
