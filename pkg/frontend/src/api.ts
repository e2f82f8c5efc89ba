/**
 * Typed client for the annotation server's HTTP API.
 *
 * Every mutating UI action goes through exactly one method here; a failed
 * call throws ApiError and the caller leaves its view untouched. The fetch
 * implementation is injectable so tests can run against an in-memory
 * server double.
 */

export interface UserInfo {
  id: string;
  username: string;
  role: "admin" | "editor" | "annotator";
}

export interface AttrInfo {
  name: string;
  required: boolean;
  enumeration: string[] | null;
  default: string | null;
}

export interface TagInfo {
  name: string;
  is_graph: boolean;
  color_index: number;
  attributes: AttrInfo[];
}

export interface TagSetInfo {
  schema_id: string;
  tags: TagInfo[];
  root_allowed: string[];
}

export interface SpanInfo {
  id: string;
  tag: string;
  start: number;
  end: number;
  attributes: Record<string, string>;
}

export interface DocumentDetail {
  id: string;
  title: string;
  text: string;
  schema_id: string | null;
  tagset: TagSetInfo | null;
  status: string | null;
}

export interface AssignmentInfo {
  document_id: string;
  title: string | null;
  status: string;
  last_modified: number;
}

export interface MyDocuments {
  pending: AssignmentInfo[];
  completed: AssignmentInfo[];
}

export interface DocumentSummary {
  id: string;
  title: string;
  schema_id: string | null;
  annotators: { annotator_id: string; status: string }[];
}

export interface ReportEntryInfo {
  code: string;
  message: string;
  location: string | number;
}

export interface ValidationInfo {
  passed: boolean;
  errors: ReportEntryInfo[];
  status?: string;
}

export interface GraphNodeInfo {
  id: string;
  tag?: string;
  start?: number;
  end?: number;
  ancestors: string[];
  descendants: string[];
}

export interface GraphInfo {
  nodes: GraphNodeInfo[];
  edges: { src: string; dst: string }[];
}

export interface AgreementInfo {
  document_id: string;
  alpha: number | "undefined" | "insufficient";
  per_annotator: {
    annotator_id: string;
    completed: boolean;
    validated: boolean;
    report_passed: boolean | null;
  }[];
}

export class ApiError extends Error {
  constructor(
    public status: number,
    public code: string,
    message: string,
    public details: Record<string, unknown> = {},
  ) {
    super(message);
  }
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  token: string | null = null;

  constructor(
    private baseUrl = "",
    private fetchImpl: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(
    method: string,
    path: string,
    body?: unknown,
    rawBody?: string,
  ): Promise<T> {
    const headers: Record<string, string> = {};
    if (this.token) headers["Authorization"] = `Bearer ${this.token}`;
    let payload: string | undefined;
    if (rawBody !== undefined) {
      payload = rawBody;
      headers["Content-Type"] = "application/xml";
    } else if (body !== undefined) {
      payload = JSON.stringify(body);
      headers["Content-Type"] = "application/json";
    }
    const response = await this.fetchImpl(this.baseUrl + path, {
      method,
      headers,
      body: payload,
    });
    if (!response.ok) {
      let code = "HttpError";
      let message = `${response.status}`;
      let details: Record<string, unknown> = {};
      try {
        const envelope = await response.json();
        code = envelope.code ?? code;
        message = envelope.message ?? message;
        details = envelope.details ?? {};
      } catch {
        /* non-JSON error body */
      }
      throw new ApiError(response.status, code, message, details);
    }
    if (response.headers.get("content-type")?.includes("xml")) {
      return (await response.text()) as unknown as T;
    }
    return (await response.json()) as T;
  }

  async login(username: string, password: string): Promise<UserInfo> {
    const data = await this.request<{ token: string; user: UserInfo }>(
      "POST", "/api/login", { username, password },
    );
    this.token = data.token;
    return data.user;
  }

  me(): Promise<UserInfo> {
    return this.request("GET", "/api/me");
  }

  createUser(username: string, password: string, role: string): Promise<UserInfo> {
    return this.request("POST", "/api/users", { username, password, role });
  }

  listUsers(): Promise<UserInfo[]> {
    return this.request("GET", "/api/users");
  }

  listAnnotators(): Promise<UserInfo[]> {
    return this.request("GET", "/api/annotators");
  }

  uploadSchema(schemaText: string): Promise<TagSetInfo> {
    return this.request("POST", "/api/schemas", undefined, schemaText);
  }

  listSchemas(): Promise<TagSetInfo[]> {
    return this.request("GET", "/api/schemas");
  }

  createDocument(title: string, text: string): Promise<{ id: string }> {
    return this.request("POST", "/api/documents", { title, text });
  }

  listDocuments(): Promise<DocumentSummary[]> {
    return this.request("GET", "/api/documents");
  }

  getDocument(docId: string): Promise<DocumentDetail> {
    return this.request("GET", `/api/documents/${docId}`);
  }

  bindSchema(docId: string, schemaId: string): Promise<unknown> {
    return this.request("PUT", `/api/documents/${docId}/schema`, {
      schema_id: schemaId,
    });
  }

  setAnnotators(docId: string, annotatorIds: string[]): Promise<unknown> {
    return this.request("PUT", `/api/documents/${docId}/annotators`, {
      annotator_ids: annotatorIds,
    });
  }

  myDocuments(): Promise<MyDocuments> {
    return this.request("GET", "/api/my/documents");
  }

  getAnnotations(docId: string): Promise<{ spans: SpanInfo[] }> {
    return this.request("GET", `/api/documents/${docId}/annotations`);
  }

  putAnnotations(
    docId: string,
    spans: Omit<SpanInfo, "id">[] | SpanInfo[],
  ): Promise<{ spans: SpanInfo[] }> {
    return this.request("PUT", `/api/documents/${docId}/annotations`, { spans });
  }

  putStatus(docId: string, status: string): Promise<{ status: string }> {
    return this.request("PUT", `/api/documents/${docId}/status`, { status });
  }

  validate(docId: string): Promise<ValidationInfo> {
    return this.request("POST", `/api/documents/${docId}/validate`);
  }

  getGraph(docId: string): Promise<GraphInfo> {
    return this.request("GET", `/api/documents/${docId}/graph`);
  }

  putGraph(
    docId: string,
    edges: { src: string; dst: string }[],
  ): Promise<GraphInfo> {
    return this.request("PUT", `/api/documents/${docId}/graph`, { edges });
  }

  agreement(docId: string): Promise<AgreementInfo> {
    return this.request("GET", `/api/documents/${docId}/agreement`);
  }

  exportXml(docId: string, annotatorId: string): Promise<string> {
    return this.request(
      "GET",
      `/api/documents/${docId}/export?annotator=${encodeURIComponent(annotatorId)}`,
    );
  }
}
