/** Runtime configuration. The API base URL is the only external setting. */

export interface Config {
  baseUrl: string;
}

let current: Config = { baseUrl: "" };

/** Point the client at a server, e.g. "http://localhost:8000". */
export function configure(config: Config): void {
  current = { baseUrl: config.baseUrl.replace(/\/+$/, "") };
}

export function getConfig(): Config {
  return current;
}
