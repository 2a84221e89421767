import { strict as assert } from "node:assert";
import { test } from "node:test";

import { cleanText } from "./clean.js";

const KNOWN = ["nova", "keystone"];

test("urls collapse to the sentinel before project names apply", () => {
  const out = cleanText("Fix https://bugs.launchpad.net/nova/+bug/1 now", "nova", KNOWN);
  assert.equal(out, "fix <url> now");
});

test("hex commit ids are dropped", () => {
  assert.equal(cleanText("commit a1b2c3d4e5f broke the gate", "nova", KNOWN), "commit broke the gate");
});

test("project names become internal/external sentinels", () => {
  const out = cleanText("nova fails after keystone upgrade", "nova", KNOWN);
  assert.equal(out, "<internal project> fails after <external project> upgrade");
});

test("traceback blocks are removed", () => {
  const raw =
    "boot broken\nTraceback (most recent call last):\n  File x.py, line 1\n  raise Boom\nstill broken";
  const out = cleanText(raw, "nova", KNOWN);
  assert.ok(!out.includes("traceback"));
  assert.ok(out.startsWith("boot broken"));
  assert.ok(out.endsWith("still broken"));
});

test("digits and special characters are stripped, text lowercased", () => {
  const out = cleanText("Error 500 in v2.0 RPC-api (50% of calls)!", "nova", KNOWN);
  assert.equal(out, "error in v rpc-api of calls");
  assert.ok(!/\d/.test(out));
});

test("words without digits survive the hex rule", () => {
  assert.ok(cleanText("a decade of defaced caches", "nova", KNOWN).includes("decade"));
});
