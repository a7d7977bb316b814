/**
 * Launch profile resolution: validate the user's launch configuration
 * against the session config document and decide how to reach the debug
 * endpoint (spawn it over stdio, or attach to a TCP port).
 *
 * All debugging intelligence lives server-side; this module only prepares
 * the connection.
 */

import * as fs from "fs";
import * as path from "path";

export interface RawLaunchConfig {
  config?: string;
  entry?: string;
  port?: number;
  host?: string;
  serverCommand?: string[];
}

export type Connection =
  | { kind: "spawn"; command: string; args: string[] }
  | { kind: "tcp"; host: string; port: number };

export interface LaunchProfile {
  configPath: string;
  entry: string;
  connection: Connection;
}

export class LaunchError extends Error {}

/** File extensions claimed by the languages of a session config. */
export function claimedExtensions(configPath: string): string[] {
  let parsed: unknown;
  try {
    parsed = JSON.parse(fs.readFileSync(configPath, "utf-8"));
  } catch (err) {
    throw new LaunchError(`cannot read session config ${configPath}: ${err}`);
  }
  const languages = (parsed as { languages?: { extensions?: string[] }[] }).languages;
  if (!Array.isArray(languages) || languages.length === 0) {
    throw new LaunchError(`session config ${configPath} lists no languages`);
  }
  const extensions: string[] = [];
  for (const language of languages) {
    for (const ext of language.extensions ?? []) {
      extensions.push(ext);
    }
  }
  return extensions;
}

export function resolveProfile(raw: RawLaunchConfig): LaunchProfile {
  if (!raw.config) {
    throw new LaunchError("launch configuration needs a 'config' path");
  }
  if (!raw.entry) {
    throw new LaunchError("launch configuration needs an 'entry' file");
  }
  const configPath = path.resolve(raw.config);
  const entry = path.resolve(raw.entry);
  if (!fs.existsSync(entry)) {
    throw new LaunchError(`entry file missing: ${entry}`);
  }

  const extensions = claimedExtensions(configPath);
  const entryExt = path.extname(entry);
  if (!extensions.includes(entryExt)) {
    throw new LaunchError(
      `entry extension '${entryExt}' is not claimed by any configured language ` +
        `(configured: ${extensions.join(", ")})`
    );
  }

  let connection: Connection;
  if (raw.port !== undefined) {
    connection = { kind: "tcp", host: raw.host ?? "127.0.0.1", port: raw.port };
  } else if (raw.serverCommand && raw.serverCommand.length > 0) {
    const [command, ...args] = raw.serverCommand;
    connection = { kind: "spawn", command, args };
  } else {
    connection = {
      kind: "spawn",
      command: "polydap",
      args: ["serve", "--config", configPath, "--stdio"],
    };
  }
  return { configPath, entry, connection };
}
